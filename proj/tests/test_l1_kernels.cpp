#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "tfac/l1_kernels.hpp"

namespace tfac {
namespace {

using testing::l1_weight_oracle;
using testing::random_mesh;

TEST(L1Weights, UnitStepValues) {
  const auto m = make_uniform(2.0, 2);
  const double a00_oracle = l1_weight_oracle(1.0, 0.0, 1.0, 0.5);
  const double a11_oracle = l1_weight_oracle(2.0, 0.0, 1.0, 0.5);
  EXPECT_NEAR(a00_oracle, 1.1283791671, 1e-10);
  EXPECT_NEAR(a11_oracle, 0.4673900, 1e-7);

  EXPECT_NEAR(l1_weights(m, 0, 0.5).weights[0], a00_oracle, 1e-14);
  const auto row1 = l1_weights(m, 1, 0.5);
  EXPECT_NEAR(row1.weights[1], a11_oracle, 1e-14);
  EXPECT_NEAR(row1.weights[1], (std::sqrt(2.0) - 1.0) / std::tgamma(1.5), 1e-15);
}

TEST(L1Weights, LeadingWeightClosedForm) {
  std::mt19937_64 rng(3);
  for (double alpha : {0.1, 0.5, 0.9}) {
    const auto m = random_mesh(rng, 20, 3.0);
    for (std::size_t n = 0; n < 20; ++n) {
      EXPECT_NEAR(l1_weights(m, n, alpha).weights[0], std::pow(m.tau(n + 1), -alpha) / std::tgamma(2.0 - alpha),
                  1e-15 * l1_weights(m, n, alpha).weights[0]);
    }
  }
}

TEST(L1Weights, MatchQuadratureOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ua(0.05, 0.95);
  for (int trial = 0; trial < 100; ++trial) {
    const double alpha = ua(rng);
    const std::size_t count = 1 + rng() % 40;
    const auto m = random_mesh(rng, count, std::exp(4.0 * ua(rng) - 2.0));
    const std::size_t n = rng() % count;
    const std::size_t k = rng() % (n + 1);
    const double a = l1_weights(m, n, alpha).weights[n - k];
    const double oracle = l1_weight_oracle(m.node(n + 1), m.node(k), m.node(k + 1), alpha);
    EXPECT_NEAR(a, oracle, 1e-12 * oracle) << "alpha=" << alpha << " n=" << n << " k=" << k;
  }
}

TEST(L1Weights, PositiveAndDecreasing) {
  std::mt19937_64 rng(5);
  for (double alpha = 0.1; alpha < 0.95; alpha += 0.1) {
    const auto m = random_mesh(rng, 30, 1.0);
    for (std::size_t n = 0; n < 30; ++n) {
      const auto w = l1_weights(m, n, alpha).weights;
      for (std::size_t j = 0; j <= n; ++j) EXPECT_GT(w[j], 0.0);
      for (std::size_t j = 1; j <= n; ++j) EXPECT_LT(w[j], w[j - 1]);
    }
  }
}

TEST(L1Weights, RejectsBadOrder) {
  const auto m = make_uniform(1.0, 4);
  EXPECT_THROW(l1_weights(m, 0, 0.0), std::invalid_argument);
  EXPECT_THROW(l1_weights(m, 0, 1.0), std::invalid_argument);
  EXPECT_THROW(l1_weights(m, 4, 0.5), std::invalid_argument);
}

TEST(L1Weights, NoCancellationForTinySteps) {
  // Tail step much smaller than the distance to the target.
  const auto m = TemporalMesh::from_nodes({0.0, 1e-12, 1e6});
  const double w = l1_weights(m, 1, 0.5).weights[1];
  const double expected = 0.5 * std::pow(1e6 - 1e-12, -0.5) / std::tgamma(1.5);
  EXPECT_NEAR(w, expected, 1e-13 * expected);
}

TEST(DocKernels, UnitStepValues) {
  const auto rows = l1_weight_rows(make_uniform(2.0, 2), 0.5, 2);
  const auto th0 = doc_kernels(rows, 0);
  EXPECT_NEAR(th0[0], std::tgamma(1.5), 1e-15);
  EXPECT_NEAR(th0[0], 0.8862269, 1e-7);
  const auto th1 = doc_kernels(rows, 1);
  EXPECT_NEAR(th1[1], -th1[0] * rows[1][1] / rows[0][0], 1e-15);
}

TEST(DocKernels, MissingRowsAreRejected) {
  const auto rows = l1_weight_rows(make_uniform(1.0, 3), 0.5, 2);
  EXPECT_THROW(doc_kernels(rows, 2), std::out_of_range);
  KernelRows bad = rows;
  bad[1].pop_back();
  EXPECT_THROW(doc_kernels(bad, 1), std::out_of_range);
  EXPECT_THROW(dcc_kernels(rows, 5), std::out_of_range);
}

TEST(KernelTriangle, IdentitiesOnRandomMeshes) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ua(0.05, 0.95);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t count = 1 + rng() % 50;
    const auto m = random_mesh(rng, count, 1.0 + 9.0 * ua(rng));
    const auto tri = build_kernel_triangle(l1_weight_rows(m, ua(rng), count));
    for (std::size_t n = 0; n < count; ++n) {
      const auto r = identity_residuals(tri, n);
      EXPECT_LE(r.delta, 1e-12);
      EXPECT_LE(r.partition, 1e-12);
      for (double p : tri.dcc[n]) EXPECT_GE(p, -1e-14);
      EXPECT_DOUBLE_EQ(tri.dcc[n][0], tri.doc[n][0]);
      EXPECT_NEAR(tri.dcc[n][0], 1.0 / tri.weights[n][0], 1e-15 / tri.weights[n][0]);
    }
  }
}

TEST(KernelTriangle, RunningDccMatchesDirectSum) {
  std::mt19937_64 rng(12);
  const auto m = random_mesh(rng, 20, 1.0);
  const auto tri = build_kernel_triangle(l1_weight_rows(m, 0.7, 20));
  for (std::size_t n = 0; n < 20; ++n) {
    const auto p = dcc_kernels(tri.doc, n);
    for (std::size_t j = 0; j <= n; ++j) {
      EXPECT_NEAR(p[j], tri.dcc[n][j], 1e-13 * std::abs(p[j]) + 1e-15);
      EXPECT_GE(p[j], 0.0);
    }
  }
}

TEST(KernelTriangle, DccBoundOnUniformMeshes) {
  // 0 <= p^{(n)}_{n-k} <= Gamma(2-a) tau^a.
  for (double alpha = 0.1; alpha < 0.95; alpha += 0.2) {
    for (double tau : {1e-3, 0.1, 1.0}) {
      const auto m = make_uniform(tau * 60, 60);
      const auto tri = build_kernel_triangle(l1_weight_rows(m, alpha, 60));
      const double bound = std::tgamma(2.0 - alpha) * std::pow(tau, alpha) * (1.0 + 1e-10);
      for (const auto& row : tri.dcc) {
        for (double p : row) {
          EXPECT_GE(p, 0.0);
          EXPECT_LE(p, bound);
        }
      }
    }
  }
}

TEST(QuadraticInequality, ZeroSequence) {
  const auto tri = build_kernel_triangle(l1_weight_rows(make_uniform(1.0, 5), 0.4, 5));
  const std::vector<double> psi(5, 0.0);
  const auto c = check_quadratic_inequality(tri.weights, tri.dcc, psi);
  EXPECT_TRUE(c.holds);
  EXPECT_EQ(c.slack, 0.0);
}

TEST(QuadraticInequality, VanishingLastEntry) {
  // n = 1, psi^1 = 0: LHS = 0 and RHS = p^{(1)}_1 v_0^2 + p^{(1)}_0 v_1^2 - p^{(0)}_0 v_0^2.
  std::mt19937_64 rng(1);
  const auto m = random_mesh(rng, 2, 1.0);
  const auto tri = build_kernel_triangle(l1_weight_rows(m, 0.6, 2));
  const std::vector<double> psi{1.3, 0.0};
  const double v0 = tri.weights[0][0] * 1.3;
  const double v1 = tri.weights[1][1] * 1.3;
  const double rhs = tri.dcc[1][1] * v0 * v0 + tri.dcc[1][0] * v1 * v1 - tri.dcc[0][0] * v0 * v0;
  const auto c = check_quadratic_inequality(tri.weights, tri.dcc, psi);
  EXPECT_NEAR(c.slack, -rhs, 1e-14);
  EXPECT_TRUE(c.holds);
}

TEST(QuadraticInequality, RandomSequences) {
  std::mt19937_64 rng(31415);
  std::normal_distribution<double> nd(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double alpha = 0.1 * static_cast<double>(1 + trial % 9);
    const std::size_t count = 1 + rng() % 30;
    const auto m = random_mesh(rng, count, 1.0);
    const auto tri = build_kernel_triangle(l1_weight_rows(m, alpha, count));
    std::vector<double> psi(count);
    for (auto& x : psi) x = nd(rng);
    const auto c = check_quadratic_inequality(tri.weights, tri.dcc, psi);
    worst = std::min(worst, c.slack);
    EXPECT_TRUE(c.holds) << "slack " << c.slack;
  }
  EXPECT_GE(worst, -1e-10);
}

TEST(QuadraticInequality, LengthMismatch) {
  const auto tri = build_kernel_triangle(l1_weight_rows(make_uniform(1.0, 3), 0.4, 3));
  const std::vector<double> psi(5, 1.0);
  EXPECT_THROW(check_quadratic_inequality(tri.weights, tri.dcc, psi), std::invalid_argument);
  EXPECT_THROW(check_quadratic_inequality(tri.weights, tri.dcc, std::vector<double>{}), std::invalid_argument);
}

}  // namespace
}  // namespace tfac
