#include "tfac/temporal_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tfac {

TemporalMesh::TemporalMesh(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  steps_.resize(nodes_.size() - 1);
  for (std::size_t n = 1; n < nodes_.size(); ++n) steps_[n - 1] = nodes_[n] - nodes_[n - 1];
}

TemporalMesh TemporalMesh::from_nodes(std::vector<double> nodes) {
  if (nodes.size() < 2) throw std::invalid_argument("temporal mesh needs at least two nodes");
  if (nodes.front() != 0.0) throw std::invalid_argument("temporal mesh must start at t = 0");
  for (std::size_t n = 1; n < nodes.size(); ++n) {
    if (!std::isfinite(nodes[n]) || !(nodes[n] > nodes[n - 1])) {
      throw std::invalid_argument("temporal mesh nodes must be finite and strictly increasing (index " +
                                  std::to_string(n) + ")");
    }
  }
  return TemporalMesh(std::move(nodes));
}

double TemporalMesh::min_step() const { return *std::min_element(steps_.begin(), steps_.end()); }

double TemporalMesh::max_step() const { return *std::max_element(steps_.begin(), steps_.end()); }

std::size_t TemporalMesh::uniform_tail_start(double rel_tol) const {
  const double last = steps_.back();
  std::size_t u = steps_.size() - 1;
  while (u > 0 && std::abs(steps_[u - 1] - last) <= rel_tol * last) --u;
  return u;
}

namespace {

void require_horizon(double horizon, std::size_t count) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("horizon T must be positive");
  if (count == 0) throw std::invalid_argument("step count N must be at least 1");
}

}  // namespace

TemporalMesh make_uniform(double horizon, std::size_t count) {
  require_horizon(horizon, count);
  std::vector<double> t(count + 1);
  const auto n_total = static_cast<double>(count);
  for (std::size_t n = 0; n < count; ++n) t[n] = horizon * (static_cast<double>(n) / n_total);
  t[count] = horizon;
  return TemporalMesh::from_nodes(std::move(t));
}

TemporalMesh make_graded(double horizon, std::size_t count, double gamma) {
  require_horizon(horizon, count);
  if (!(gamma >= 1.0) || !std::isfinite(gamma)) throw std::invalid_argument("grading exponent must satisfy gamma >= 1");
  std::vector<double> t(count + 1);
  const auto n_total = static_cast<double>(count);
  for (std::size_t n = 0; n < count; ++n) t[n] = horizon * std::pow(static_cast<double>(n) / n_total, gamma);
  t[count] = horizon;
  return TemporalMesh::from_nodes(std::move(t));
}

TemporalMesh make_composite(double horizon, double t_switch, std::size_t graded_count, double gamma,
                            double tail_step) {
  if (!(t_switch > 0.0) || !(t_switch < horizon)) throw std::invalid_argument("composite mesh needs 0 < t_switch < T");
  if (!(tail_step > 0.0)) throw std::invalid_argument("composite mesh tail step must be positive");
  const TemporalMesh head = make_graded(t_switch, graded_count, gamma);

  const double span = horizon - t_switch;
  const auto tail_count = static_cast<std::size_t>(std::ceil(span / tail_step * (1.0 - 1e-12)));
  const std::size_t m = std::max<std::size_t>(tail_count, 1);

  std::vector<double> t(head.nodes().begin(), head.nodes().end());
  t.reserve(t.size() + m);
  const auto m_total = static_cast<double>(m);
  for (std::size_t j = 1; j < m; ++j) t.push_back(t_switch + span * (static_cast<double>(j) / m_total));
  t.push_back(horizon);
  return TemporalMesh::from_nodes(std::move(t));
}

double max_step_ratio(const TemporalMesh& mesh) {
  if (mesh.count() < 2) throw std::invalid_argument("step ratio needs at least two steps");
  double ratio = 0.0;
  for (std::size_t k = 1; k < mesh.count(); ++k) ratio = std::max(ratio, mesh.tau(k) / mesh.tau(k + 1));
  return ratio;
}

AdaptiveController::AdaptiveController(double tau_min, double tau_max, double gain)
    : tau_min_(tau_min), tau_max_(tau_max), gain_(gain) {
  if (!(tau_min > 0.0) || !(tau_min <= tau_max) || !std::isfinite(tau_max)) {
    throw std::invalid_argument("adaptive controller needs 0 < tau_min <= tau_max");
  }
  if (!(gain > 0.0) || !std::isfinite(gain)) throw std::invalid_argument("adaptive gain must be positive");
}

double adaptive_next_step(const AdaptiveController& controller, double energy_rate) {
  if (!std::isfinite(energy_rate)) throw std::invalid_argument("energy rate must be finite");
  const double tau = controller.tau_max() / std::sqrt(1.0 + controller.gain() * energy_rate * energy_rate);
  return std::clamp(tau, controller.tau_min(), controller.tau_max());
}

}  // namespace tfac
