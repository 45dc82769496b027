#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "tfac/energy.hpp"
#include "tfac/l1_kernels.hpp"

namespace tfac {
namespace {

ScalarField random_field(const GridSpec& g, double amplitude, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  ScalarField f(g);
  for (auto& v : f.values) v = u(rng);
  return f;
}

TEST(FreeEnergy, Examples) {
  const ModelParams params{1e-3, 2.0, 0.5};
  EXPECT_EQ(free_energy(ScalarField(make_grid(2, 16, 1.0), 1.0), params), 0.0);
  EXPECT_NEAR(free_energy(ScalarField(make_grid(2, 16, 1.0), 0.0), params), 0.25, 1e-15);
  EXPECT_NEAR(free_energy(ScalarField(make_grid(3, 8, 2.0), 0.0), params), 0.25 * 8.0, 1e-14);
}

TEST(FreeEnergy, QuadraticFormIdentity) {
  std::mt19937_64 rng(1);
  const ModelParams params{3e-3, 2.0, 0.5};
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = make_grid(2, 24, 2.0);
    const auto phi = random_field(g, 1.2, rng);
    const auto lap = laplacian_apply(phi);
    double quad = 0.0, bulk = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) {
      quad += phi[p] * lap[p];
      bulk += potential_F(phi[p]);
    }
    const double h2 = g.h() * g.h();
    const double tensor = -0.5 * h2 * params.eps2 * quad + h2 * bulk;
    EXPECT_NEAR(free_energy(phi, params), tensor, 1e-12 * std::abs(tensor));
  }
}

TEST(Mbp, Threshold) {
  const auto half = mbp_check(ScalarField(make_grid(2, 4, 1.0), 0.5));
  EXPECT_EQ(half.sup_norm, 0.5);
  EXPECT_FALSE(half.violated);
  ScalarField f(make_grid(2, 4, 1.0), 0.0);
  f[3] = 1.0 + 1e-6;
  EXPECT_TRUE(mbp_check(f).violated);
  f[3] = -1.0;
  EXPECT_FALSE(mbp_check(f).violated);
}

TEST(VariationalEnergy, Trivial) {
  EXPECT_EQ(variational_energy(0.7, {}, {}, 0), 0.7);
  const std::vector<double> zeros(5, 0.0), row{1.0, 0.5, 0.3, 0.2, 0.1};
  EXPECT_EQ(variational_energy(0.7, zeros, row, 5), 0.7);
  EXPECT_THROW(variational_energy(0.7, zeros, row, 6), std::invalid_argument);
}

// The accumulated history term agrees with the explicit DCC-weighted sum
// built from the kernel triangle of the kernels the scheme applied.
TEST(EnergyMonitor, MatchesExplicitDccSum) {
  std::mt19937_64 rng(2);
  const auto g = make_grid(2, 12, 2.0);
  const auto mesh = testing::random_mesh(rng, 40, 5.0);
  const ModelParams params{1e-3, 2.0, 0.45};
  for (auto mode : {SchemeMode::direct, SchemeMode::fast}) {
    StateOptions opts;
    opts.mode = mode;
    opts.mesh = mesh;
    if (mode == SchemeMode::fast) opts.soe = build_soe(params.alpha, 1e-10, mesh.min_step(), mesh.horizon());
    SchemeState state(params, random_field(g, 0.5, rng), opts);
    EnergyMonitor monitor(state);
    EXPECT_EQ(monitor.last().E_alpha, monitor.last().E_h);
    const auto rows = mode == SchemeMode::fast ? fast_weight_rows(*opts.soe, mesh, mesh.count())
                                               : l1_weight_rows(mesh, params.alpha, mesh.count());
    const auto tri = build_kernel_triangle(rows);
    for (std::size_t n = 0; n < mesh.count(); ++n) {
      advance(state, SchemeType::pc, mesh);
      const auto& row = monitor.observe(state);
      const double ref = variational_energy(row.E_h, state.lalpha_log(), tri.dcc[n], n + 1);
      EXPECT_NEAR(row.E_alpha, ref, 1e-11 * std::abs(ref));
      EXPECT_GE(row.E_alpha, row.E_h - 1e-14);
    }
    EXPECT_EQ(monitor.energy_violations(), 0u);
    EXPECT_EQ(monitor.mbp_violations(), 0u);
  }
}

TEST(EnergyMonitor, DissipationOnRandomMeshes) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 8; ++trial) {
    const auto g = make_grid(2, 16, 2.0);
    const auto mesh = testing::random_mesh(rng, 60, trial % 2 ? 30.0 : 1.0);
    const ModelParams params{1e-3, 2.0, 0.1 + 0.1 * trial};
    for (auto type : {SchemeType::sfl1, SchemeType::pc}) {
      StateOptions opts;
      opts.mode = SchemeMode::fast;
      opts.soe = build_soe(params.alpha, 1e-10, mesh.min_step(), mesh.horizon());
      SchemeState state(params, random_field(g, trial < 4 ? 1e-3 : 0.9, rng), opts);
      EnergyMonitor monitor(state);
      for (std::size_t n = 0; n < mesh.count(); ++n) {
        advance(state, type, mesh);
        monitor.observe(state);
      }
      EXPECT_EQ(monitor.energy_violations(), 0u) << "trial " << trial;
      EXPECT_EQ(monitor.mbp_violations(), 0u) << "trial " << trial;
    }
  }
}

TEST(EnergyMonitor, DisablesMbpForOutOfRangeData) {
  const auto g = make_grid(2, 8, 1.0);
  const auto mesh = make_uniform(1.0, 5);
  StateOptions opts;
  opts.mode = SchemeMode::direct;
  SchemeState state(ModelParams{}, ScalarField(g, 1.5), opts);
  EnergyMonitor monitor(state);
  EXPECT_FALSE(monitor.mbp_monitored());
  for (std::size_t n = 0; n < mesh.count(); ++n) {
    advance(state, SchemeType::pc, mesh);
    monitor.observe(state);
  }
  EXPECT_EQ(monitor.mbp_violations(), 0u);
}

TEST(EnergyLog, CsvFormat) {
  EnergyLog log;
  log.append({0, 0.0, 0.0, 0.5, 0.25, 0.25, 0.0});
  log.append({1, 0.1, 0.1, 0.4, 0.2, 0.21, -0.04});
  EXPECT_EQ(log.to_csv(), "step,t,tau,sup_norm,E_h,E_alpha,dE_alpha\n0,0,0,0.5,0.25,0.25,0\n1,0.1,0.1,0.4,0.2,0.21,-0.04\n");
  EXPECT_THROW(log.append({3, 0, 0, 0, 0, 0, 0}), std::invalid_argument);
}

}  // namespace
}  // namespace tfac
