#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "tfac/space_disc.hpp"

namespace tfac {
namespace {

ScalarField random_field(const GridSpec& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField f(g);
  for (auto& v : f.values) v = u(rng);
  return f;
}

Eigen::MatrixXd dense_laplacian(const GridSpec& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd D(n, n);
  std::vector<double> e(g.size(), 0.0), col(g.size());
  for (Eigen::Index c = 0; c < n; ++c) {
    e[static_cast<std::size_t>(c)] = 1.0;
    laplacian_apply(g, e, col);
    for (Eigen::Index r = 0; r < n; ++r) D(r, c) = col[static_cast<std::size_t>(r)];
    e[static_cast<std::size_t>(c)] = 0.0;
  }
  return D;
}

double residual_ratio(const GridSpec& g, double shift, double eps2, const std::vector<double>& u,
                      const std::vector<double>& rhs) {
  std::vector<double> y(u.size());
  helmholtz_apply(g, shift, eps2, u, y);
  double num = 0.0, den = 0.0;
  for (std::size_t p = 0; p < u.size(); ++p) {
    num += (y[p] - rhs[p]) * (y[p] - rhs[p]);
    den += rhs[p] * rhs[p];
  }
  return std::sqrt(num / den);
}

TEST(Grid, Validation) {
  EXPECT_THROW(make_grid(0, 8, 1.0), std::invalid_argument);
  EXPECT_THROW(make_grid(4, 8, 1.0), std::invalid_argument);
  EXPECT_THROW(make_grid(2, 1, 1.0), std::invalid_argument);
  EXPECT_THROW(make_grid(2, 8, 0.0), std::invalid_argument);
  const auto g = make_grid(3, 4, 2.0);
  EXPECT_EQ(g.size(), 64u);
  EXPECT_DOUBLE_EQ(g.h(), 0.5);
  EXPECT_THROW(ScalarField(g, std::vector<double>(10)), std::invalid_argument);
}

TEST(Norms, ConstantFields) {
  const auto g = make_grid(2, 16, 1.0);
  const ScalarField one(g, 1.0);
  EXPECT_NEAR(inner(one, one), 1.0, 1e-14);
  EXPECT_NEAR(norm_l2(one), 1.0, 1e-14);
  EXPECT_EQ(seminorm_h1(ScalarField(g, -0.3)), 0.0);
  EXPECT_EQ(norm_max(ScalarField(g, -0.3)), 0.3);
  const auto other = make_grid(2, 8, 1.0);
  EXPECT_THROW(inner(one, ScalarField(other, 1.0)), std::invalid_argument);
}

TEST(Norms, MaxIsPointwise) {
  const auto g = make_grid(2, 4, 1.0);
  ScalarField f(g, 0.1);
  f[5] = -0.9;
  EXPECT_EQ(norm_max(f), 0.9);
}

TEST(Laplacian, ConstantsMapToZeroAndSumVanishes) {
  std::mt19937_64 rng(1);
  for (int dim : {1, 2, 3}) {
    const auto g = make_grid(dim, 9, 1.3);
    for (double v : laplacian_apply(ScalarField(g, 0.7)).values) EXPECT_EQ(v, 0.0);
    const auto lap = laplacian_apply(random_field(g, rng));
    double s = 0.0, m = 0.0;
    for (double v : lap.values) s += v, m += std::abs(v);
    EXPECT_LE(std::abs(s), 1e-13 * m);
  }
}

TEST(Laplacian, CosineEigenpair) {
  const auto g = make_grid(2, 16, 1.0);
  const auto phi = sample(g, [](double x, double y, double) { return std::cos(std::numbers::pi * x) * std::cos(std::numbers::pi * y); });
  const double lam1 = neumann_eigenvalues_1d(g)[1];
  EXPECT_NEAR(lam1, -4.0 / (g.h() * g.h()) * std::pow(std::sin(std::numbers::pi / 32.0), 2), 1e-12);
  const auto lap = laplacian_apply(phi);
  for (std::size_t p = 0; p < phi.size(); ++p) EXPECT_NEAR(lap[p], 2.0 * lam1 * phi[p], 1e-11);

  // Dense eigensolver on the 1D operator.
  const auto g1 = make_grid(1, 16, 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_laplacian(g1));
  auto lam = neumann_eigenvalues_1d(g1);
  std::sort(lam.begin(), lam.end());
  for (std::size_t k = 0; k < lam.size(); ++k) EXPECT_NEAR(es.eigenvalues()[static_cast<Eigen::Index>(k)], lam[k], 1e-10);
}

TEST(Laplacian, GreenIdentitySymmetryAndSign) {
  std::mt19937_64 rng(2);
  for (int dim : {1, 2, 3}) {
    const auto g = make_grid(dim, dim == 3 ? 10 : 33, 2.5);
    for (int trial = 0; trial < 20; ++trial) {
      const auto u = random_field(g, rng), v = random_field(g, rng);
      const double luv = inner(laplacian_apply(u), v);
      const double ulv = inner(u, laplacian_apply(v));
      EXPECT_NEAR(luv, ulv, 1e-13 * std::max(std::abs(luv), 1.0) * 10);
      const double luu = inner(laplacian_apply(u), u);
      EXPECT_LE(luu, 1e-13 * inner(u, u));
      const double h1 = seminorm_h1_squared(g, u.values);
      EXPECT_NEAR(-luu, h1, 1e-12 * h1);
    }
  }
}

TEST(Laplacian, NullSpaceIsConstants) {
  for (const auto& g : {make_grid(1, 16, 1.0), make_grid(2, 8, 1.0), make_grid(3, 4, 1.0)}) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_laplacian(g));
    const auto& ev = es.eigenvalues();
    const double scale = ev.cwiseAbs().maxCoeff();
    int zeros = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) zeros += std::abs(ev[i]) < 1e-10 * scale;
    EXPECT_EQ(zeros, 1);
    EXPECT_LE(ev.maxCoeff(), 1e-10 * scale);
  }
}

TEST(Laplacian, SecondOrderConsistency) {
  const double L = 2.0;
  const double k1 = std::numbers::pi / L, k2 = 2.0 * std::numbers::pi / L;
  std::vector<double> errs;
  for (std::size_t M : {16u, 32u, 64u, 128u}) {
    const auto g = make_grid(2, M, L);
    const auto phi = sample(g, [&](double x, double y, double) { return std::cos(k1 * x) * std::cos(k2 * y); });
    const auto lap = laplacian_apply(phi);
    double e = 0.0;
    for (std::size_t p = 0; p < phi.size(); ++p) e = std::max(e, std::abs(lap[p] + (k1 * k1 + k2 * k2) * phi[p]));
    errs.push_back(e);
  }
  for (std::size_t i = 1; i < errs.size(); ++i) EXPECT_NEAR(std::log2(errs[i - 1] / errs[i]), 2.0, 0.1);
}

TEST(Helmholtz, ConstantSolution) {
  const auto g = make_grid(2, 32, 1.0);
  HelmholtzSolver solver(g, 0.01);
  const auto u = solver.solve(3.0, ScalarField(g, 3.0 * 0.4));
  for (double v : u.values) EXPECT_NEAR(v, 0.4, 1e-14);
  EXPECT_EQ(solver.solve_count(), 1u);
}

TEST(Helmholtz, TensorEigenvector) {
  const auto g1 = make_grid(1, 12, 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_laplacian(g1));
  const auto g = make_grid(2, 12, 1.0);
  const double shift = 2.5, eps2 = 0.03;
  for (auto [a, b] : {std::pair{1, 4}, std::pair{7, 11}, std::pair{0, 5}}) {
    const auto va = es.eigenvectors().col(a), vb = es.eigenvectors().col(b);
    const double lam = es.eigenvalues()[a] + es.eigenvalues()[b];
    ScalarField v(g), rhs(g);
    for (std::size_t j = 0; j < 12; ++j) {
      for (std::size_t i = 0; i < 12; ++i) {
        v[i + 12 * j] = va[static_cast<Eigen::Index>(i)] * vb[static_cast<Eigen::Index>(j)];
        rhs[i + 12 * j] = (shift - eps2 * lam) * v[i + 12 * j];
      }
    }
    for (auto method : {HelmholtzMethod::cosine_transform, HelmholtzMethod::conjugate_gradient}) {
      HelmholtzSolver solver(g, eps2, method);
      const auto u = solver.solve(shift, rhs);
      for (std::size_t p = 0; p < v.size(); ++p) EXPECT_NEAR(u[p], v[p], 1e-12);
    }
  }
}

TEST(Helmholtz, RandomResiduals) {
  std::mt19937_64 rng(3);
  for (const auto& g : {make_grid(1, 256, 2.0), make_grid(2, 64, 2.0 * std::numbers::pi), make_grid(3, 16, 1.0)}) {
    for (auto method : {HelmholtzMethod::cosine_transform, HelmholtzMethod::conjugate_gradient}) {
      HelmholtzSolver solver(g, 1e-3, method);
      for (double shift : {1e-3, 2.0, 1e4}) {
        const auto rhs = random_field(g, rng);
        const auto u = solver.solve(shift, rhs);
        EXPECT_LE(residual_ratio(g, shift, 1e-3, u.values, rhs.values), 1e-12);
      }
    }
  }
}

TEST(Helmholtz, RejectsBadInput) {
  const auto g = make_grid(2, 8, 1.0);
  HelmholtzSolver solver(g, 0.1);
  EXPECT_THROW(solver.solve(0.0, ScalarField(g)), std::invalid_argument);
  EXPECT_THROW(solver.solve(-1.0, ScalarField(g)), std::invalid_argument);
  EXPECT_THROW(solver.solve(1.0, ScalarField(make_grid(2, 4, 1.0))), std::invalid_argument);
  EXPECT_THROW(HelmholtzSolver(g, -1.0), std::invalid_argument);
}

}  // namespace
}  // namespace tfac
