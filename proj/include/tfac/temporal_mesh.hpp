#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tfac {

/// Time nodes 0 = t_0 < t_1 < ... < t_N = T with their step sizes.
///
/// Steps are stored next to the nodes (tau(n) = t_n - t_{n-1}, taken from the
/// stored nodes) so kernels never recompute them from large node values.
class TemporalMesh {
 public:
  /// Validates and adopts a node sequence. Throws std::invalid_argument if
  /// the nodes do not start at 0 or are not strictly increasing.
  static TemporalMesh from_nodes(std::vector<double> nodes);

  std::span<const double> nodes() const { return nodes_; }
  /// steps()[n-1] == tau(n).
  std::span<const double> steps() const { return steps_; }

  double node(std::size_t n) const { return nodes_[n]; }
  /// Step tau_n for 1 <= n <= N.
  double tau(std::size_t n) const { return steps_[n - 1]; }

  std::size_t count() const { return steps_.size(); }
  double horizon() const { return nodes_.back(); }
  double min_step() const;
  double max_step() const;

  /// Smallest index u such that tau_{u+1} .. tau_N agree to a relative
  /// tolerance; N - 1 when only the last step qualifies.
  std::size_t uniform_tail_start(double rel_tol = 1e-12) const;

 private:
  explicit TemporalMesh(std::vector<double> nodes);

  std::vector<double> nodes_;
  std::vector<double> steps_;
};

TemporalMesh make_uniform(double horizon, std::size_t count);

/// t_n = T (n/N)^gamma. gamma == 1 reproduces make_uniform bit-for-bit.
TemporalMesh make_graded(double horizon, std::size_t count, double gamma);

/// Graded mesh on [0, t_switch] with `graded_count` steps followed by equal
/// steps of size at most `tail_step` on [t_switch, T]. The node t_switch is
/// shared exactly; the tail step is (T - t_switch) / ceil((T - t_switch) / tail_step).
TemporalMesh make_composite(double horizon, double t_switch, std::size_t graded_count,
                            double gamma, double tail_step);

/// max_k tau_k / tau_{k+1}. Requires N >= 2.
double max_step_ratio(const TemporalMesh& mesh);

/// Energy-variation step selector
///   tau = max(tau_min, tau_max / sqrt(1 + gain |dE/dt|^2)).
class AdaptiveController {
 public:
  AdaptiveController(double tau_min, double tau_max, double gain);

  double tau_min() const { return tau_min_; }
  double tau_max() const { return tau_max_; }
  double gain() const { return gain_; }

 private:
  double tau_min_;
  double tau_max_;
  double gain_;
};

double adaptive_next_step(const AdaptiveController& controller, double energy_rate);

}  // namespace tfac
