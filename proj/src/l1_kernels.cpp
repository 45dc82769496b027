#include "tfac/l1_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tfac {

namespace {

void require_order(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("fractional order alpha must lie in (0, 1)");
}

void require_rows(const KernelRows& rows, std::size_t n, const char* what) {
  if (rows.size() <= n) {
    throw std::out_of_range(std::string(what) + ": rows 0.." + std::to_string(n) + " required, have " +
                            std::to_string(rows.size()));
  }
  for (std::size_t j = 0; j <= n; ++j) {
    if (rows[j].size() != j + 1) throw std::out_of_range(std::string(what) + ": row " + std::to_string(j) + " is malformed");
  }
}

}  // namespace

double l1_interval_weight(double gap, double step, double alpha, double gamma_2ma) {
  const double beta = 1.0 - alpha;
  if (gap <= 0.0) return std::pow(step, -alpha) / gamma_2ma;
  // (gap + step)^beta - gap^beta without cancellation when step << gap.
  const double diff = std::pow(gap, beta) * std::expm1(beta * std::log1p(step / gap));
  return diff / (gamma_2ma * step);
}

L1WeightRow l1_weights(const TemporalMesh& mesh, std::size_t n, double alpha) {
  require_order(alpha);
  if (n >= mesh.count()) throw std::invalid_argument("l1_weights: row index must be below N");
  const double g = std::tgamma(2.0 - alpha);
  const double target = mesh.node(n + 1);
  L1WeightRow row{n, alpha, std::vector<double>(n + 1)};
  for (std::size_t k = 0; k <= n; ++k) {
    const double gap = (k == n) ? 0.0 : target - mesh.node(k + 1);
    row.weights[n - k] = l1_interval_weight(gap, mesh.tau(k + 1), alpha, g);
  }
  return row;
}

KernelRows l1_weight_rows(const TemporalMesh& mesh, double alpha, std::size_t count) {
  KernelRows rows;
  rows.reserve(count);
  for (std::size_t n = 0; n < count; ++n) rows.push_back(l1_weights(mesh, n, alpha).weights);
  return rows;
}

std::vector<double> doc_kernels(const KernelRows& weight_rows, std::size_t n) {
  require_rows(weight_rows, n, "doc_kernels");
  std::vector<double> theta(n + 1, 0.0);
  theta[0] = 1.0 / weight_rows[n][0];
  for (std::size_t kk = n; kk-- > 0;) {
    // theta^{(n)}_{n-k} = -(1/K^{(k)}_0) sum_{j=k+1}^{n} theta^{(n)}_{n-j} K^{(j)}_{j-k}
    double s = 0.0;
    for (std::size_t j = kk + 1; j <= n; ++j) s += theta[n - j] * weight_rows[j][j - kk];
    theta[n - kk] = -s / weight_rows[kk][0];
  }
  return theta;
}

std::vector<double> dcc_kernels(const KernelRows& doc_rows, std::size_t n) {
  require_rows(doc_rows, n, "dcc_kernels");
  std::vector<double> p(n + 1, 0.0);
  for (std::size_t k = 0; k <= n; ++k) {
    double s = 0.0;
    for (std::size_t j = k; j <= n; ++j) s += doc_rows[j][j - k];
    p[n - k] = s;
  }
  return p;
}

KernelTriangle build_kernel_triangle(KernelRows weight_rows) {
  KernelTriangle tri;
  tri.weights = std::move(weight_rows);
  const std::size_t rows = tri.weights.size();
  tri.doc.reserve(rows);
  tri.dcc.reserve(rows);
  for (std::size_t n = 0; n < rows; ++n) {
    tri.doc.push_back(doc_kernels(tri.weights, n));
    // Running form of the DCC sum: p^{(n)}_{n-k} = p^{(n-1)}_{n-1-k} + theta^{(n)}_{n-k}.
    std::vector<double> p(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
      const double prev = (k < n) ? tri.dcc[n - 1][n - 1 - k] : 0.0;
      p[n - k] = prev + tri.doc[n][n - k];
    }
    tri.dcc.push_back(std::move(p));
  }
  return tri;
}

IdentityResiduals identity_residuals(const KernelTriangle& tri, std::size_t n) {
  require_rows(tri.weights, n, "identity_residuals");
  IdentityResiduals r;
  for (std::size_t k = 0; k <= n; ++k) {
    double s_delta = 0.0, m_delta = 0.0, s_part = 0.0, m_part = 0.0;
    for (std::size_t j = k; j <= n; ++j) {
      const double td = tri.doc[n][n - j] * tri.weights[j][j - k];
      const double pa = tri.dcc[n][n - j] * tri.weights[j][j - k];
      s_delta += td;
      m_delta += std::abs(td);
      s_part += pa;
      m_part += std::abs(pa);
    }
    const double target = (k == n) ? 1.0 : 0.0;
    r.delta = std::max(r.delta, std::abs(s_delta - target) / std::max(1.0, m_delta));
    r.partition = std::max(r.partition, std::abs(s_part - 1.0) / std::max(1.0, m_part));
  }
  return r;
}

QuadraticCheck check_quadratic_inequality(const KernelRows& weight_rows, const KernelRows& dcc_rows,
                                          std::span<const double> psi, double tolerance) {
  if (psi.empty()) throw std::invalid_argument("check_quadratic_inequality: empty sequence");
  const std::size_t n = psi.size() - 1;
  if (weight_rows.size() < n + 1 || dcc_rows.size() < n + 1) {
    throw std::invalid_argument("check_quadratic_inequality: sequence longer than kernel triangle");
  }
  require_rows(weight_rows, n, "check_quadratic_inequality");
  require_rows(dcc_rows, n, "check_quadratic_inequality");

  std::vector<double> v(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j <= k; ++j) s += weight_rows[k][k - j] * psi[j];
    v[k] = s;
  }
  const double lhs = 2.0 * psi[n] * v[n];
  double rhs = weight_rows[n][0] * psi[n] * psi[n];
  for (std::size_t k = 0; k <= n; ++k) rhs += dcc_rows[n][n - k] * v[k] * v[k];
  for (std::size_t k = 0; k < n; ++k) rhs -= dcc_rows[n - 1][n - 1 - k] * v[k] * v[k];

  QuadraticCheck c;
  c.slack = lhs - rhs;
  c.holds = c.slack >= -tolerance;
  return c;
}

}  // namespace tfac
