#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "test_support.hpp"
#include "tfac/quadrature.hpp"
#include "tfac/soe.hpp"

namespace tfac {
namespace {

using testing::random_mesh;

TEST(Quadrature, GaussLegendreIsExactForPolynomials) {
  for (std::size_t n : {1u, 2u, 5u, 16u, 30u}) {
    const auto rule = gauss_legendre(n);
    for (std::size_t k = 0; k < 2 * n; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += rule.weights[j] * std::pow(rule.nodes[j], static_cast<double>(k));
      const double exact = (k % 2 == 1) ? 0.0 : 2.0 / static_cast<double>(k + 1);
      EXPECT_NEAR(s, exact, 1e-13) << "n=" << n << " k=" << k;
    }
  }
}

TEST(Quadrature, GaussJacobiMomentsOfSingularWeight) {
  for (double b : {-0.9, -0.5, -0.1, 0.0, 0.7}) {
    for (std::size_t n : {1u, 4u, 12u}) {
      const auto rule = gauss_jacobi_left(n, b);
      for (std::size_t k = 0; k < 2 * n; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += rule.weights[j] * std::pow(rule.nodes[j], static_cast<double>(k));
        const double exact = 1.0 / (b + static_cast<double>(k) + 1.0);
        EXPECT_NEAR(s, exact, 1e-12 * exact) << "b=" << b << " n=" << n << " k=" << k;
      }
    }
  }
}

TEST(StepCoefficient, MeanOfDecayingExponential) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  for (double x : {1e-9, 3e-5, 9.99e-5, 1e-4, 0.01, std::log(2.0), 1.0, 30.0}) {
    const double oracle = integrator.integrate([&](double s) { return std::exp(-x * s); }, 0.0, 1.0);
    EXPECT_NEAR(exp_mean(x), oracle, 1e-15) << x;
  }
  EXPECT_NEAR(exp_mean(std::log(2.0)), 0.5 / std::log(2.0), 1e-15);
  EXPECT_NEAR(exp_mean(std::log(2.0)), 0.7213475, 1e-7);
  EXPECT_EQ(exp_mean(0.0), 1.0);
}

TEST(StepCoefficient, RangeAndErrors) {
  const auto soe = build_soe(0.5, 1e-8, 1e-4, 1.0);
  for (double tau : {1e-8, 1e-3, 1.0, 1e3}) {
    for (double b : step_coefficient(soe, tau)) {
      EXPECT_GT(b, 0.0);
      EXPECT_LE(b, 1.0);
    }
  }
  EXPECT_THROW(step_coefficient(soe, 0.0), std::invalid_argument);
}

double independent_scan(const SoeApproximation& soe, std::uint64_t seed, int points) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(std::log(soe.delta), std::log(soe.horizon));
  double worst = 0.0;
  for (int j = 0; j < points; ++j) {
    const double t = std::exp(u(rng));
    worst = std::max(worst, std::abs(std::pow(t, -soe.alpha) / std::tgamma(1.0 - soe.alpha) - eval_soe(soe, t)));
  }
  return worst;
}

TEST(BuildSoe, ReferenceCase) {
  const auto soe = build_soe(0.5, 1e-8, 1e-4, 1.0);
  EXPECT_LE(soe.certified_error, 1e-8);
  EXPECT_LE(independent_scan(soe, 1, 50000), 1e-8);
  for (double t : {1e-4, 1.0}) EXPECT_NEAR(eval_soe(soe, t), std::pow(t, -0.5) / std::tgamma(0.5), 1e-8);
  for (std::size_t i = 0; i < soe.size(); ++i) {
    EXPECT_GT(soe.weights[i], 0.0);
    if (i > 0) EXPECT_GT(soe.nodes[i], soe.nodes[i - 1]);
  }
}

TEST(BuildSoe, CertifiesAcrossOrdersAndTolerances) {
  for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    for (double tol : {1e-6, 1e-8, 1e-10}) {
      const auto soe = build_soe(alpha, tol, 1e-6, 1.0);
      EXPECT_LE(soe.certified_error, tol);
      EXPECT_LE(independent_scan(soe, 17, 20000), tol) << "alpha=" << alpha << " tol=" << tol;
    }
  }
}

TEST(BuildSoe, LongHorizon) {
  const auto soe = build_soe(0.4, 1e-10, 1e-3, 50.0);
  EXPECT_LE(soe.certified_error, 1e-10);
  EXPECT_LE(independent_scan(soe, 5, 20000), 1e-10);
}

TEST(BuildSoe, DyadicGaussLegendreOption) {
  SoeOptions opt;
  opt.quadrature = SoeQuadrature::dyadic_gauss_legendre;
  for (double alpha : {0.1, 0.5, 0.9}) {
    for (double tol : {1e-6, 1e-10}) {
      const auto soe = build_soe(alpha, tol, 1e-6, 1.0, opt);
      EXPECT_LE(soe.certified_error, tol);
      EXPECT_LE(independent_scan(soe, 3, 20000), tol);
      for (std::size_t i = 1; i < soe.size(); ++i) EXPECT_GT(soe.nodes[i], soe.nodes[i - 1]);
    }
  }
}

TEST(BuildSoe, TighterToleranceNeverUsesFewerNodes) {
  for (double alpha : {0.2, 0.5, 0.8}) {
    std::size_t previous = 0;
    for (double tol = 1e-3; tol >= 1e-11; tol /= 10.0) {
      if (tol > soe_tolerance_cap(alpha, 1.0)) continue;
      const auto soe = build_soe(alpha, tol, 1e-5, 1.0);
      EXPECT_GE(soe.size(), previous) << "alpha=" << alpha << " tol=" << tol;
      previous = soe.size();
    }
  }
}

TEST(BuildSoe, RejectsInvalidInput) {
  EXPECT_THROW(build_soe(0.0, 1e-8, 1e-4, 1.0), std::invalid_argument);
  EXPECT_THROW(build_soe(0.5, 1e-8, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(build_soe(0.5, 1e-8, 2.0, 1.0), std::invalid_argument);
  EXPECT_THROW(build_soe(0.5, -1.0, 1e-4, 1.0), std::invalid_argument);
  // Above min(T^-a / (3 Gamma(1-a)), a / Gamma(2-a)).
  const double cap = soe_tolerance_cap(0.5, 100.0);
  EXPECT_NEAR(cap, 0.1 / (3.0 * std::sqrt(std::numbers::pi)), 1e-15);
  EXPECT_THROW(build_soe(0.5, 2.0 * cap, 1e-4, 100.0), std::invalid_argument);
  EXPECT_NO_THROW(build_soe(0.5, cap, 1e-4, 100.0));
}

TEST(BuildSoe, UnattainableToleranceReportsAchievedError) {
  try {
    build_soe(0.5, 1e-17, 1e-4, 1.0);
    FAIL() << "expected SoeBuildError";
  } catch (const SoeBuildError& e) {
    EXPECT_GT(e.achieved_error(), 1e-17);
    EXPECT_LT(e.achieved_error(), 1e-10);
  }
}

TEST(EvalSoe, DecreasingAndVanishing) {
  const auto soe = build_soe(0.3, 1e-8, 1e-4, 1.0);
  double previous = eval_soe(soe, 1e-6);
  for (double t = 2e-6; t < 1e6; t *= 1.7) {
    const double v = eval_soe(soe, t);
    EXPECT_LT(v, previous);
    previous = v;
  }
  double total = 0.0;
  for (double w : soe.weights) total += w;
  EXPECT_LE(eval_soe(soe, 50.0 / soe.nodes.front()), total * std::exp(-50.0));
  EXPECT_THROW(eval_soe(soe, 0.0), std::invalid_argument);
  EXPECT_THROW(eval_soe(soe, -1.0), std::invalid_argument);
}

TEST(SoeHistory, ZeroDifferenceKeepsZero) {
  const auto soe = build_soe(0.5, 1e-8, 1e-4, 1.0);
  SoeHistory hist(soe, 8);
  const std::vector<double> zero(8, 0.0);
  for (int k = 0; k < 5; ++k) hist.update_history(zero, 0.01);
  for (std::size_t i = 0; i < hist.node_count(); ++i) {
    for (double h : hist.accumulator(i)) EXPECT_EQ(h, 0.0);
  }
  std::vector<double> out(8, 1.0);
  hist.evaluate(0.01, out);
  for (double v : out) EXPECT_EQ(v, 0.0);
}

TEST(SoeHistory, SingleNodeConstantDifference) {
  SoeApproximation one;
  one.alpha = 0.5;
  one.nodes = {3.0};
  one.weights = {0.25};
  SoeHistory hist(one, 5);
  const std::vector<double> d(5, 1.7);
  hist.update_history(d, 0.2);
  const double b = (1.0 - std::exp(-0.6)) / 0.6;
  for (double h : hist.accumulator(0)) EXPECT_NEAR(h, b * 1.7, 1e-15);
  EXPECT_NEAR(hist.last_coefficients()[0], b, 1e-15);
}

TEST(SoeHistory, GridMismatchRejected) {
  const auto soe = build_soe(0.5, 1e-8, 1e-4, 1.0);
  SoeHistory hist(soe, 4);
  const std::vector<double> d(5, 0.0);
  EXPECT_THROW(hist.update_history(d, 0.1), std::invalid_argument);
  std::vector<double> out(3);
  EXPECT_THROW(hist.evaluate(0.1, out), std::invalid_argument);
}

TEST(SoeHistory, RecursionEqualsFastConvolution) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (double alpha : {0.2, 0.5, 0.8}) {
    const std::size_t count = 200;
    const auto mesh = random_mesh(rng, count, 2.0);
    const auto soe = build_soe(alpha, 1e-10, mesh.min_step(), mesh.horizon());
    std::vector<double> phi(count + 1);
    for (auto& x : phi) x = nd(rng);

    SoeHistory hist(soe, 1);
    for (std::size_t n = 0; n < count; ++n) {
      // History part at step n: sum_{k<n} A^{(n)}_{n-k} (phi^{k+1} - phi^k).
      double fast = 0.0;
      hist.evaluate(mesh.tau(n + 1), std::span<double>(&fast, 1));
      const auto a = fast_weights(soe, mesh, n);
      double direct = 0.0, scale = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        direct += a[n - k] * (phi[k + 1] - phi[k]);
        scale += std::abs(a[n - k] * (phi[k + 1] - phi[k]));
      }
      EXPECT_NEAR(fast, direct, 1e-12 * std::max(1.0, scale)) << "n=" << n;
      const double diff = phi[n + 1] - phi[n];
      hist.update_history(std::span<const double>(&diff, 1), mesh.tau(n + 1));
    }
  }
}

TEST(FastWeights, LemmaAudits) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const double alpha = 0.1 + 0.8 * static_cast<double>(trial % 5) / 4.0;
    const std::size_t count = 2 + rng() % 60;
    const auto mesh = random_mesh(rng, count, 1.0);
    const double tol = std::min(1e-8, soe_tolerance_cap(alpha, 1.0));
    const auto soe = build_soe(alpha, tol, mesh.min_step(), mesh.horizon());
    for (std::size_t n = 0; n < count; ++n) {
      const auto A = fast_weights(soe, mesh, n);
      const auto a = l1_weights(mesh, n, alpha).weights;
      EXPECT_EQ(A[0], a[0]);
      for (std::size_t j = 0; j <= n; ++j) {
        EXPECT_GT(A[j], 0.0);
        if (j > 0) {
          EXPECT_LT(A[j], A[j - 1]);
          EXPECT_GE(A[j], 2.0 / 3.0 * a[j]);
          EXPECT_LE(std::abs(A[j] - a[j]), tol + 1e-13);
        }
      }
    }
  }
}

}  // namespace
}  // namespace tfac
