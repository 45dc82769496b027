#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tfac/config.hpp"
#include "tfac/energy.hpp"
#include "tfac/schemes.hpp"
#include "tfac/temporal_mesh.hpp"

namespace tfac {

/// min(1 + alpha, 2 - alpha) / alpha, the head grading used for coarsening runs.
double coarsening_grading(double alpha);

/// The full mesh of a non-adaptive config (empty for N == 0); for adaptive
/// configs the graded head on [0, t_switch] (empty when N == 0).
std::optional<TemporalMesh> build_mesh(const MeshConfig& mesh, double alpha);

/// Smallest step a run can take; the default SOE cutoff.
double smallest_step(const MeshConfig& mesh, double alpha);

ScalarField initial_field(const RunConfig& config);

struct RunReport {
  std::string config_hash;
  ScalarField final_field;
  EnergyLog log;
  std::size_t steps = 0;
  double final_time = 0.0;
  std::size_t mbp_violations = 0;
  std::size_t energy_violations = 0;
  std::size_t unhalved_energy_violations = 0;
  bool mbp_monitored = true;
  double max_sup_norm = 0.0;
  std::size_t soe_nodes = 0;
  double min_tau = 0.0;
  double max_tau = 0.0;
  /// Final-time max-norm error against the exact solution (manufactured runs).
  std::optional<double> max_error;
  std::vector<std::string> warnings;
  std::vector<std::string> snapshots;
  double wall_time = 0.0;
};

using RunObserver = std::function<void(const SchemeState&, const EnergyRow&)>;

/// Runs the configured experiment; writes the CSV log, snapshots and the JSON
/// summary when config.output.dir is set.
RunReport run_simulation(const RunConfig& config, const RunObserver& observer = {});

/// JSON summary {config_hash, mbp_violations, energy_violations, wall_time, ...}.
std::string summary_json(const RunReport& report);

}  // namespace tfac
