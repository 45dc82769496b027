#include "tfac/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tfac/l1_kernels.hpp"
#include "tfac/manufactured.hpp"
#include "tfac/soe.hpp"

namespace tfac {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double d = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) d = std::max(d, std::abs(a[p] - b[p]));
  return d;
}

}  // namespace

TemporalMesh random_mesh(std::mt19937_64& rng, std::size_t count, double horizon, double decades) {
  if (count == 0) throw std::invalid_argument("random_mesh: count must be positive");
  std::uniform_real_distribution<double> u(-decades, 0.0);
  std::vector<double> steps(count);
  double total = 0.0;
  for (auto& s : steps) {
    s = std::pow(10.0, u(rng));
    total += s;
  }
  std::vector<double> t(count + 1, 0.0);
  for (std::size_t n = 0; n < count; ++n) t[n + 1] = t[n] + steps[n] * horizon / total;
  t[count] = std::max(t[count], t[count - 1] * (1.0 + 1e-15));
  return TemporalMesh::from_nodes(std::move(t));
}

KernelCheckReport run_kernel_check(std::uint64_t seed, std::size_t meshes, std::size_t max_count,
                                   std::size_t sequences) {
  const auto start = Clock::now();
  KernelCheckReport r;
  r.min_dcc = std::numeric_limits<double>::infinity();
  r.min_quadratic_slack = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  for (std::size_t i = 0; i < meshes; ++i) {
    const std::size_t count = 1 + rng() % max_count;
    const auto mesh = random_mesh(rng, count, 1.0 + 9.0 * u(rng));
    for (int k = 1; k <= 9; ++k) {
      const auto tri = build_kernel_triangle(l1_weight_rows(mesh, 0.1 * k, count));
      for (std::size_t n = 0; n < count; ++n) {
        const auto res = identity_residuals(tri, n);
        r.max_delta_residual = std::max(r.max_delta_residual, res.delta);
        r.max_partition_residual = std::max(r.max_partition_residual, res.partition);
        for (double p : tri.dcc[n]) r.min_dcc = std::min(r.min_dcc, p);
        ++r.rows;
      }
    }
    ++r.meshes;
  }

  std::normal_distribution<double> nd(0.0, 1.0);
  for (std::size_t s = 0; s < sequences; ++s) {
    const double alpha = 0.1 * static_cast<double>(1 + s % 9);
    const std::size_t count = 1 + rng() % max_count;
    const auto mesh = random_mesh(rng, count, 1.0 + 9.0 * u(rng));
    const auto tri = build_kernel_triangle(l1_weight_rows(mesh, alpha, count));
    std::vector<double> psi(count);
    for (auto& x : psi) x = nd(rng);
    r.min_quadratic_slack = std::min(r.min_quadratic_slack, check_quadratic_inequality(tri.weights, tri.dcc, psi).slack);
    ++r.sequences;
  }
  r.wall_time = seconds_since(start);
  return r;
}

SoeCheckReport run_soe_check(std::uint64_t seed, const std::vector<double>& alphas, const std::vector<double>& tols,
                             double delta, double horizon, std::size_t audit_meshes) {
  const auto start = Clock::now();
  SoeCheckReport r;
  r.min_ratio = std::numeric_limits<double>::infinity();
  std::vector<SoeApproximation> soes;
  for (double alpha : alphas) {
    for (double tol : tols) {
      soes.push_back(build_soe(alpha, tol, delta, horizon));
      // Independent of the build's own certification scan.
      r.entries.push_back({alpha, tol, soes.back().size(), soe_scan_error(soes.back(), 100003)});
    }
  }

  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < audit_meshes; ++i) {
    const std::size_t count = 2 + rng() % 60;
    const auto mesh = random_mesh(rng, count, horizon);
    if (mesh.min_step() < delta) continue;
    for (const auto& soe : soes) {
      for (std::size_t n = 0; n < count; ++n) {
        const auto A = fast_weights(soe, mesh, n);
        const auto a = l1_weights(mesh, n, soe.alpha).weights;
        if (A[0] != a[0]) r.leading_exact = false;
        for (std::size_t j = 1; j <= n; ++j) {
          if (!(A[j] > 0.0 && A[j] < A[j - 1])) r.rows_decreasing = false;
          r.min_ratio = std::min(r.min_ratio, A[j] / a[j]);
          r.max_weight_error = std::max(r.max_weight_error, std::abs(A[j] - a[j]) / soe.tol);
        }
      }
    }
    ++r.audit_meshes;
  }
  r.wall_time = seconds_since(start);
  return r;
}

RunConfig convergence_config(const ConvergenceSetup& s, std::size_t N) {
  RunConfig c;
  c.model = {s.eps2, s.kappa, s.alpha};
  c.grid = {s.dim, s.M, s.L};
  c.mesh.type = "graded";
  c.mesh.T = s.T;
  c.mesh.N = N;
  c.mesh.gamma = s.gamma;
  c.scheme.type = s.scheme;
  c.scheme.mode = s.mode;
  c.scheme.soe_tol = s.soe_tol;
  c.scheme.direct = DirectEvaluation::sum;
  c.source = "manufactured";
  c.init.type = "manufactured";
  c.init.mu = s.mu;
  return c;
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t last) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fitted_slope: need two or more points");
  const std::size_t k = std::min(last, x.size());
  const std::size_t first = x.size() - k;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = first; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = first; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

ConvergenceReport run_convergence(const ConvergenceSetup& s) {
  if (s.ladder.size() < 2) throw std::invalid_argument("run_convergence: ladder needs two or more entries");
  ConvergenceReport report;
  std::vector<double> taus, errors;
  for (std::size_t N : s.ladder) {
    if (!report.entries.empty() && N <= report.entries.back().N) {
      throw std::invalid_argument("run_convergence: ladder must be strictly increasing");
    }
    const auto config = convergence_config(s, N);
    const auto run = run_simulation(config);
    ConvergenceEntry e;
    e.N = N;
    e.tau_max = build_mesh(config.mesh, s.alpha)->max_step();
    e.error = *run.max_error;
    e.wall_time = run.wall_time;
    e.mbp_violations = run.mbp_violations;
    e.energy_violations = run.energy_violations;
    if (!report.entries.empty() && !(e.error < report.entries.back().error)) report.monotone = false;
    report.entries.push_back(e);
    taus.push_back(e.tau_max);
    errors.push_back(e.error);
  }
  report.slope = fitted_slope(taus, errors, 4);
  return report;
}

SpatialCheck spatial_refinement_check(const ConvergenceSetup& s, std::size_t N) {
  SpatialCheck r;
  r.N = N;
  r.error_coarse = *run_simulation(convergence_config(s, N)).max_error;
  ConvergenceSetup fine = s;
  fine.M = 2 * s.M;
  r.error_fine = *run_simulation(convergence_config(fine, N)).max_error;
  return r;
}

RunConfig coarsening_config(double alpha, double tau, SchemeMode mode, std::size_t M, double T, int dim,
                            std::uint64_t seed) {
  RunConfig c;
  c.model = {1e-3, 2.0, alpha};
  c.grid = {dim, M, 2.0};
  c.mesh.type = "composite";
  c.mesh.T = T;
  c.mesh.N = 100;
  c.mesh.t_switch = 0.1;
  c.mesh.tau = tau;
  c.scheme.type = SchemeType::pc;
  c.scheme.mode = mode;
  c.scheme.soe_tol = 1e-10;
  c.init.type = "random_uniform";
  c.init.amplitude = 1e-3;
  c.init.seed = seed;
  return c;
}

RunReport run_coarsening(const RunConfig& config) { return run_simulation(config); }

namespace {

struct LockstepPair {
  SchemeState direct;
  SchemeState fast;
};

LockstepPair make_pair(const PerfSetup& s, const TemporalMesh& mesh) {
  const ModelParams params{s.eps2, 2.0, s.alpha};
  const GridSpec grid{s.dim, s.M, s.L};
  const auto phi0 = random_uniform_field(grid, s.amplitude, s.seed);
  StateOptions d;
  d.mode = SchemeMode::direct;
  d.direct = DirectEvaluation::sum;
  StateOptions f;
  f.mode = SchemeMode::fast;
  f.soe = build_soe(s.alpha, s.soe_tol, mesh.min_step(), mesh.horizon());
  return {SchemeState(params, phi0, std::move(d)), SchemeState(params, phi0, std::move(f))};
}

}  // namespace

std::vector<PerfRow> run_perf_compare(const PerfSetup& s) {
  std::vector<PerfRow> rows;
  for (std::size_t N : s.ladder) {
    const auto mesh = make_uniform(s.tau * static_cast<double>(N), N);
    auto pair = make_pair(s, mesh);
    PerfRow row;
    row.N = N;
    for (std::size_t n = 1; n <= N; ++n) {
      auto t0 = Clock::now();
      pc_step(pair.direct, mesh.node(n));
      row.direct_time += seconds_since(t0);
      t0 = Clock::now();
      pc_step(pair.fast, mesh.node(n));
      row.fast_time += seconds_since(t0);
      row.divergence = std::max(row.divergence, max_abs_diff(pair.direct.phi(), pair.fast.phi()));
    }
    rows.push_back(row);
  }
  return rows;
}

StepProfile run_step_profile(const PerfSetup& s, std::size_t N, std::size_t repeats) {
  if (N == 0 || repeats == 0) throw std::invalid_argument("run_step_profile: N and repeats must be positive");
  const auto mesh = make_uniform(s.tau * static_cast<double>(N), N);
  StepProfile prof;
  const double inf = std::numeric_limits<double>::infinity();
  prof.direct_step_time.assign(N, inf);
  prof.fast_step_time.assign(N, inf);
  for (std::size_t r = 0; r < repeats; ++r) {
    auto pair = make_pair(s, mesh);
    prof.soe_nodes = pair.fast.soe()->size();
    double divergence = 0.0;
    for (std::size_t n = 1; n <= N; ++n) {
      auto t0 = Clock::now();
      pc_step(pair.direct, mesh.node(n));
      prof.direct_step_time[n - 1] = std::min(prof.direct_step_time[n - 1], seconds_since(t0));
      t0 = Clock::now();
      pc_step(pair.fast, mesh.node(n));
      prof.fast_step_time[n - 1] = std::min(prof.fast_step_time[n - 1], seconds_since(t0));
      divergence = std::max(divergence, max_abs_diff(pair.direct.phi(), pair.fast.phi()));
    }
    prof.divergence = divergence;
  }
  return prof;
}

double window_median(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  if (!(begin < end && end <= v.size())) throw std::invalid_argument("window_median: bad window");
  std::vector<double> w(v.begin() + static_cast<std::ptrdiff_t>(begin), v.begin() + static_cast<std::ptrdiff_t>(end));
  const auto mid = w.begin() + static_cast<std::ptrdiff_t>(w.size() / 2);
  std::nth_element(w.begin(), mid, w.end());
  if (w.size() % 2 == 1) return *mid;
  const double hi = *mid;
  return 0.5 * (hi + *std::max_element(w.begin(), mid));
}

}  // namespace tfac
