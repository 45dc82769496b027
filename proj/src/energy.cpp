#include "tfac/energy.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace tfac {

double free_energy(const ScalarField& phi, const ModelParams& params) {
  double bulk = 0.0;
  for (double v : phi.values) bulk += potential_F(v);
  return 0.5 * params.eps2 * seminorm_h1_squared(phi.grid, phi.values) + phi.grid.cell_volume() * bulk;
}

double variational_energy(double free_energy, std::span<const double> lalpha_log, std::span<const double> dcc_row,
                          std::size_t n) {
  if (lalpha_log.size() < n) throw std::invalid_argument("variational_energy: log shorter than the step index");
  if (n > 0 && dcc_row.size() < n) throw std::invalid_argument("variational_energy: DCC row too short");
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += dcc_row[n - 1 - k] * lalpha_log[k];
  return free_energy + 0.5 * s;
}

MbpResult mbp_check(std::span<const double> values) {
  const double m = norm_max(values);
  return {m, m > kMbpThreshold};
}

void EnergyLog::append(const EnergyRow& row) {
  if (!rows_.empty() && row.step != rows_.back().step + 1) throw std::invalid_argument("EnergyLog: rows must be appended in step order");
  rows_.push_back(row);
}

namespace {

void put(std::string& out, double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

}  // namespace

std::string EnergyLog::to_csv() const {
  std::string out = "step,t,tau,sup_norm,E_h,E_alpha,dE_alpha\n";
  for (const auto& r : rows_) {
    out += std::to_string(r.step);
    for (double v : {r.t, r.tau, r.sup_norm, r.E_h, r.E_alpha, r.dE_alpha}) {
      out += ',';
      put(out, v);
    }
    out += '\n';
  }
  return out;
}

void EnergyLog::write_csv(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << to_csv();
  if (!f) throw std::runtime_error("write failed: " + path);
}

EnergyMonitor::EnergyMonitor(const SchemeState& state, double energy_rtol)
    : params_(state.params()), rtol_(energy_rtol), gamma_2ma_(std::tgamma(2.0 - state.params().alpha)) {
  if (state.step() != 0) throw std::invalid_argument("EnergyMonitor: attach before the first step");
  if (state.mode() == SchemeMode::fast) {
    engine_ = std::make_unique<SoeHistoryEngine>(*state.soe(), 1);
  } else {
    const auto& mesh = state.planned_mesh();
    engine_ = make_direct_history(params_.alpha, 1, mesh ? &*mesh : nullptr);
  }
  const auto mbp = mbp_check(state.phi());
  mbp_monitored_ = !mbp.violated;
  const double e = free_energy(state.phi(), params_);
  log_.append({0, 0.0, 0.0, mbp.sup_norm, e, e, 0.0});
  unhalved_prev_ = e;
}

const EnergyRow& EnergyMonitor::observe(const SchemeState& state) {
  const std::size_t n = state.step();
  if (n != log_.size()) throw std::logic_error("EnergyMonitor::observe: call once per accepted step");
  const double t_left = state.times()[n - 1], t_right = state.times()[n];
  const double tau = t_right - t_left;
  const double g = state.lalpha_log().back();

  double conv = 0.0;
  engine_->history(t_right, std::span<double>(&conv, 1));
  const double k0 = std::pow(tau, -params_.alpha) / gamma_2ma_;
  const double y = (g - conv) / k0;
  engine_->append(std::span<const double>(&y, 1), t_left, t_right);

  const EnergyRow& prev = log_.rows().back();
  EnergyRow row;
  row.step = n;
  row.t = t_right;
  row.tau = tau;
  const auto mbp = mbp_check(state.phi());
  row.sup_norm = mbp.sup_norm;
  row.E_h = free_energy(state.phi(), params_);
  history_sum_ += 0.5 * y;
  row.E_alpha = row.E_h + history_sum_;
  row.dE_alpha = (row.E_h - prev.E_h) + 0.5 * y;
  if (mbp_monitored_ && (mbp.violated || mbp_check(state.predictor()).violated)) ++mbp_violations_;
  if (row.dE_alpha > rtol_ * std::abs(prev.E_alpha)) {
    ++energy_violations_;
    if (energy_violation_steps_.size() < 16) energy_violation_steps_.push_back(n);
  }
  const double unhalved = row.E_h + 2.0 * history_sum_;
  if (unhalved - unhalved_prev_ > rtol_ * std::abs(unhalved_prev_)) ++unhalved_violations_;
  unhalved_prev_ = unhalved;
  log_.append(row);
  return log_.rows().back();
}

}  // namespace tfac
