#include "tfac/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <limits>
#include <stdexcept>

#include "tfac/io.hpp"
#include "tfac/manufactured.hpp"

namespace tfac {

double coarsening_grading(double alpha) { return std::min(1.0 + alpha, 2.0 - alpha) / alpha; }

std::optional<TemporalMesh> build_mesh(const MeshConfig& m, double alpha) {
  const double head_gamma = m.gamma.value_or(coarsening_grading(alpha));
  if ((m.type == "uniform" || m.type == "graded") && m.N == 0) return std::nullopt;
  if (m.type == "uniform") return make_uniform(m.T, m.N);
  if (m.type == "graded") return make_graded(m.T, m.N, m.gamma.value_or(1.0));
  if (m.type == "composite") return make_composite(m.T, m.t_switch, m.N, head_gamma, m.tau);
  if (m.type == "adaptive") {
    AdaptiveController(m.tau_min, m.tau_max, m.adp_gain);  // validates the controller parameters
    if (m.N == 0) return std::nullopt;
    if (!(m.t_switch > 0.0 && m.t_switch < m.T)) throw std::invalid_argument("mesh: adaptive head needs 0 < t_switch < T");
    return make_graded(m.t_switch, m.N, head_gamma);
  }
  throw std::invalid_argument("mesh: unknown type '" + m.type + "'");
}

double smallest_step(const MeshConfig& m, double alpha) {
  const auto mesh = build_mesh(m, alpha);
  if (m.type != "adaptive") return mesh ? mesh->min_step() : m.T;
  return mesh ? std::min(mesh->min_step(), m.tau_min) : m.tau_min;
}

ScalarField initial_field(const RunConfig& c) {
  if (c.init.type == "random_uniform") return random_uniform_field(c.grid, c.init.amplitude, c.init.seed);
  if (c.init.type == "constant") return ScalarField(c.grid, c.init.value);
  ManufacturedCase mc{c.init.mu, c.model, c.grid.dim};
  return mc.exact_field(c.grid, 0.0);
}

namespace {

std::string step_name(std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "phi_%07zu", n);
  return buf;
}

class SnapshotWriter {
 public:
  explicit SnapshotWriter(const OutputConfig& out) : out_(out), times_(out.snapshot_times) {
    std::sort(times_.begin(), times_.end());
    enabled_ = !out.dir.empty() && out.snapshot_format != "none";
  }

  void maybe_write(const SchemeState& state, RunReport& report) {
    if (!enabled_) return;
    const std::size_t n = state.step();
    const double t = state.time();
    bool due = out_.snapshot_every > 0 && n % out_.snapshot_every == 0;
    while (next_ < times_.size() && t >= times_[next_] * (1.0 - 1e-12)) {
      due = true;
      ++next_;
    }
    if (!due) return;
    const auto base = (std::filesystem::path(out_.dir) / "snapshots" / step_name(n)).string();
    if (out_.snapshot_format == "vtk" || out_.snapshot_format == "both") {
      write_vtk(base + ".vtk", state.phi(), t);
      report.snapshots.push_back(base + ".vtk");
    }
    if (out_.snapshot_format == "raw" || out_.snapshot_format == "both") {
      write_raw(base, state.phi(), t);
      report.snapshots.push_back(base + ".bin");
    }
  }

 private:
  OutputConfig out_;
  std::vector<double> times_;
  std::size_t next_ = 0;
  bool enabled_ = false;
};

// Next adaptive step from t, never overshooting T and never leaving a
// remainder shorter than tau_min.
double next_adaptive_time(const AdaptiveController& ctl, double rate, double t, double T) {
  double tau = adaptive_next_step(ctl, rate);
  const double rem = T - t;
  if (rem <= tau * (1.0 + 1e-12)) return T;
  if (rem - tau < ctl.tau_min()) tau = rem <= ctl.tau_max() ? rem : 0.5 * rem;
  return tau >= rem ? T : t + tau;
}

}  // namespace

RunReport run_simulation(const RunConfig& c, const RunObserver& observer) {
  const auto start = std::chrono::steady_clock::now();
  validate(c.model);
  RunReport report;
  report.config_hash = config_hash(c);
  if (c.model.kappa < 2.0) {
    report.warnings.push_back("kappa < 2 with the double-well potential: the maximum bound principle is not guaranteed");
  }

  const bool adaptive = c.mesh.type == "adaptive";
  const auto mesh = build_mesh(c.mesh, c.model.alpha);
  const double T = mesh && !adaptive ? mesh->horizon() : c.mesh.T;

  StateOptions opts;
  const bool empty = !adaptive && (!mesh || mesh->count() == 0);
  opts.mode = empty ? SchemeMode::direct : c.scheme.mode;
  opts.direct = c.scheme.direct;
  if (!adaptive) opts.mesh = mesh;
  if (opts.mode == SchemeMode::fast) {
    const double delta = c.scheme.soe_delta.value_or(smallest_step(c.mesh, c.model.alpha));
    opts.soe = build_soe(c.model.alpha, c.scheme.soe_tol, delta, T);
    report.soe_nodes = opts.soe->size();
  }
  std::optional<ManufacturedCase> manufactured;
  if (c.source == "manufactured") {
    manufactured = ManufacturedCase{c.init.mu, c.model, c.grid.dim};
    opts.source = manufactured->source_term(c.grid);
  }

  SchemeState state(c.model, initial_field(c), std::move(opts));
  EnergyMonitor monitor(state);
  if (!monitor.mbp_monitored()) {
    report.warnings.push_back("initial data leave [-1, 1]; maximum bound monitoring disabled");
  }
  SnapshotWriter snapshots(c.output);
  snapshots.maybe_write(state, report);
  if (observer) observer(state, monitor.last());
  report.max_sup_norm = monitor.last().sup_norm;
  report.min_tau = std::numeric_limits<double>::infinity();

  auto take_step = [&](double t_next) {
    try {
      advance(state, c.scheme.type, t_next);
      const auto& row = monitor.observe(state);
      report.max_sup_norm = std::max(report.max_sup_norm, row.sup_norm);
      report.min_tau = std::min(report.min_tau, row.tau);
      report.max_tau = std::max(report.max_tau, row.tau);
      snapshots.maybe_write(state, report);
      if (observer) observer(state, row);
    } catch (const std::exception& e) {
      throw std::runtime_error("run aborted at step " + std::to_string(state.step() + 1) + " (t=" + format_double(t_next) +
                               ", sup norm " + format_double(norm_max(state.phi())) + "): " + e.what());
    }
  };

  if (mesh) {
    for (std::size_t n = 0; n < mesh->count(); ++n) take_step(mesh->node(n + 1));
  }
  if (adaptive) {
    const AdaptiveController ctl(c.mesh.tau_min, c.mesh.tau_max, c.mesh.adp_gain);
    while (state.time() < T) {
      double rate = 0.0;
      const auto& rows = monitor.log().rows();
      if (rows.size() >= 2) rate = (rows.back().E_alpha - rows[rows.size() - 2].E_alpha) / rows.back().tau;
      take_step(next_adaptive_time(ctl, rate, state.time(), T));
    }
  }
  if (state.step() == 0) report.min_tau = 0.0;

  report.steps = state.step();
  report.final_time = state.time();
  report.final_field = state.phi();
  report.log = monitor.log();
  report.mbp_monitored = monitor.mbp_monitored();
  report.mbp_violations = monitor.mbp_violations();
  report.energy_violations = monitor.energy_violations();
  report.unhalved_energy_violations = monitor.unhalved_violations();
  if (manufactured) {
    const auto exact = manufactured->exact_field(c.grid, state.time());
    double e = 0.0;
    for (std::size_t p = 0; p < exact.size(); ++p) e = std::max(e, std::abs(exact[p] - state.phi()[p]));
    report.max_error = e;
  }
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!c.output.dir.empty()) {
    const std::filesystem::path dir(c.output.dir);
    std::string csv = "step,t,tau,sup_norm,E_h,E_alpha,dE_alpha\n";
    if (c.output.log_every == 1) {
      csv = report.log.to_csv();
    } else {
      // Thinned rows are not consecutive, so they bypass EnergyLog.
      for (const auto& row : report.log.rows()) {
        if (row.step % c.output.log_every != 0 && row.step != report.steps) continue;
        csv += std::to_string(row.step);
        for (double v : {row.t, row.tau, row.sup_norm, row.E_h, row.E_alpha, row.dE_alpha}) csv += "," + format_double(v);
        csv += "\n";
      }
    }
    write_text((dir / c.output.csv_path).string(), csv);
    write_text((dir / c.output.summary_path).string(), summary_json(report));
  }
  return report;
}

std::string summary_json(const RunReport& r) {
  nlohmann::json j = {{"config_hash", r.config_hash},
                      {"mbp_violations", r.mbp_violations},
                      {"energy_violations", r.energy_violations},
                      {"unhalved_energy_violations", r.unhalved_energy_violations},
                      {"mbp_monitored", r.mbp_monitored},
                      {"wall_time", r.wall_time},
                      {"steps", r.steps},
                      {"final_time", r.final_time},
                      {"max_sup_norm", r.max_sup_norm},
                      {"soe_nodes", r.soe_nodes},
                      {"warnings", r.warnings},
                      {"snapshots", r.snapshots}};
  if (r.max_error) j["max_error"] = *r.max_error;
  return j.dump(2) + "\n";
}

}  // namespace tfac
