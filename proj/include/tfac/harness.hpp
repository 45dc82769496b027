#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "tfac/config.hpp"
#include "tfac/schemes.hpp"
#include "tfac/simulation.hpp"
#include "tfac/temporal_mesh.hpp"

namespace tfac {

/// Mesh on [0, T] whose steps are 10^u, u uniform on [-decades, 0], rescaled.
TemporalMesh random_mesh(std::mt19937_64& rng, std::size_t count, double horizon, double decades = 2.0);

struct KernelCheckReport {
  std::size_t meshes = 0;
  std::size_t rows = 0;
  std::size_t sequences = 0;
  double max_delta_residual = 0.0;
  double max_partition_residual = 0.0;
  double min_dcc = 0.0;
  double min_quadratic_slack = 0.0;
  double wall_time = 0.0;
};

/// DOC/DCC identities and DCC signs on `meshes` random meshes (N <= max_count)
/// for alpha = 0.1 .. 0.9, and the quadratic kernel inequality on `sequences`
/// random sequences.
KernelCheckReport run_kernel_check(std::uint64_t seed, std::size_t meshes = 200, std::size_t max_count = 50,
                                   std::size_t sequences = 1000);

struct SoeCheckEntry {
  double alpha = 0.0;
  double tol = 0.0;
  std::size_t nodes = 0;
  double scan_error = 0.0;
};

struct SoeCheckReport {
  std::vector<SoeCheckEntry> entries;
  std::size_t audit_meshes = 0;
  bool leading_exact = true;      // A_0 == a_0 bit for bit
  bool rows_decreasing = true;    // A_j > A_{j+1} > 0
  double min_ratio = 0.0;         // min A_j / a_j over j >= 1
  double max_weight_error = 0.0;  // max |A_j - a_j| / tol
  double wall_time = 0.0;
};

SoeCheckReport run_soe_check(std::uint64_t seed, const std::vector<double>& alphas, const std::vector<double>& tols,
                             double delta = 1e-6, double horizon = 1.0, std::size_t audit_meshes = 50);

struct ConvergenceSetup {
  double alpha = 0.3;
  double mu = 0.5;
  double gamma = 1.0;
  std::vector<std::size_t> ladder = {100, 200, 400, 800, 1600, 3200};
  SchemeType scheme = SchemeType::pc;
  SchemeMode mode = SchemeMode::fast;
  double soe_tol = 1e-9;
  int dim = 2;
  std::size_t M = 64;
  double L = 2.0 * std::numbers::pi;
  double eps2 = 1e-4;
  double kappa = 2.0;
  double T = 1.0;
};

struct ConvergenceEntry {
  std::size_t N = 0;
  double tau_max = 0.0;
  double error = 0.0;
  double wall_time = 0.0;
  std::size_t mbp_violations = 0;
  std::size_t energy_violations = 0;
};

struct ConvergenceReport {
  std::vector<ConvergenceEntry> entries;
  /// Least-squares slope of log error against log tau_max over the finest four.
  double slope = 0.0;
  /// False when some refinement failed to reduce the error.
  bool monotone = true;
};

/// Manufactured-solution run config for one ladder entry.
RunConfig convergence_config(const ConvergenceSetup& setup, std::size_t N);

ConvergenceReport run_convergence(const ConvergenceSetup& setup);

/// Least-squares slope of log y against log x over the last `last` points.
double fitted_slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t last = 4);

struct SpatialCheck {
  std::size_t N = 0;
  double error_coarse = 0.0;  // grid M
  double error_fine = 0.0;    // grid 2M
};

/// Final-time errors at N steps on grids M and 2M; spatial error is
/// subdominant when the two agree closely.
SpatialCheck spatial_refinement_check(const ConvergenceSetup& setup, std::size_t N);

/// Coarsening run config: random data of amplitude 1e-3, eps2 = 1e-3 on
/// (-1, 1)^dim, graded head of 100 steps on [0, 0.1] then uniform steps tau.
RunConfig coarsening_config(double alpha, double tau, SchemeMode mode, std::size_t M = 64, double T = 50.0, int dim = 2,
                            std::uint64_t seed = 0);

RunReport run_coarsening(const RunConfig& config);

struct PerfSetup {
  std::vector<std::size_t> ladder = {500, 1000, 2000, 4000};
  int dim = 1;
  std::size_t M = 256;
  double L = 2.0;
  double alpha = 0.5;
  double eps2 = 1e-3;
  double tau = 0.01;
  double soe_tol = 1e-10;
  double amplitude = 0.9;
  std::uint64_t seed = 0;
};

struct PerfRow {
  std::size_t N = 0;
  double direct_time = 0.0;
  double fast_time = 0.0;
  double divergence = 0.0;
};

/// Direct (plain sum) and fast modes stepped in lockstep from identical data.
std::vector<PerfRow> run_perf_compare(const PerfSetup& setup);

struct StepProfile {
  std::vector<double> direct_step_time;  // seconds, per step, minimum over repeats
  std::vector<double> fast_step_time;
  double divergence = 0.0;
  std::size_t soe_nodes = 0;
};

StepProfile run_step_profile(const PerfSetup& setup, std::size_t N, std::size_t repeats = 3);

/// Median of v[begin, end).
double window_median(const std::vector<double>& v, std::size_t begin, std::size_t end);

}  // namespace tfac
