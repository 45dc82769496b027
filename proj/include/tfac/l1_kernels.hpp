#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tfac/temporal_mesh.hpp"

namespace tfac {

/// One row of the nonuniform L1 convolution weights a^{(n)}_0 .. a^{(n)}_n.
/// weights[j] multiplies the increment phi^{n-j+1} - phi^{n-j}.
struct L1WeightRow {
  std::size_t step = 0;
  double alpha = 0.0;
  std::vector<double> weights;
};

/// Rows 0..n of a lower-triangular convolution kernel: rows[n][j] = K^{(n)}_j.
/// Used for the L1 weights a and for the fast weights A alike.
using KernelRows = std::vector<std::vector<double>>;

/// Mean of (t_target - s)^{-alpha} / Gamma(1 - alpha) over one interval of
/// length `step` whose right end sits `gap` >= 0 before the target time.
/// `gamma_2ma` is Gamma(2 - alpha), passed in so hot loops evaluate it once.
double l1_interval_weight(double gap, double step, double alpha, double gamma_2ma);

/// a^{(n)}_{n-k} = [(t_{n+1}-t_k)^{1-a} - (t_{n+1}-t_{k+1})^{1-a}] / (Gamma(2-a) tau_{k+1}).
/// Requires n < N and alpha in (0, 1).
L1WeightRow l1_weights(const TemporalMesh& mesh, std::size_t n, double alpha);

/// L1 rows 0..count-1 in KernelRows layout.
KernelRows l1_weight_rows(const TemporalMesh& mesh, double alpha, std::size_t count);

/// DOC row theta^{(n)}_0 .. theta^{(n)}_n of the kernel rows 0..n:
///   sum_{j=k}^{n} theta^{(n)}_{n-j} K^{(j)}_{j-k} = delta_{nk}.
std::vector<double> doc_kernels(const KernelRows& weight_rows, std::size_t n);

/// DCC row p^{(n)}_0 .. p^{(n)}_n from DOC rows 0..n:
///   p^{(n)}_{n-k} = sum_{j=k}^{n} theta^{(j)}_{j-k}.
std::vector<double> dcc_kernels(const KernelRows& doc_rows, std::size_t n);

/// Weights together with their DOC and DCC triangles.
struct KernelTriangle {
  KernelRows weights;
  KernelRows doc;
  KernelRows dcc;

  std::size_t rows() const { return weights.size(); }
};

KernelTriangle build_kernel_triangle(KernelRows weight_rows);

/// Residuals of the two defining identities for row n, maximised over k and
/// scaled by the magnitude of the summed terms.
struct IdentityResiduals {
  double delta = 0.0;      ///< max_k |sum theta K - delta_{nk}| / max(1, sum |theta K|)
  double partition = 0.0;  ///< max_k |sum p K - 1| / max(1, sum |p K|)
};

IdentityResiduals identity_residuals(const KernelTriangle& triangle, std::size_t n);

struct QuadraticCheck {
  bool holds = false;
  double slack = 0.0;  ///< LHS - RHS
};

/// Evaluates, for n = psi.size() - 1,
///   2 psi^n sum_k K^{(n)}_{n-k} psi^k
///     >= K^{(n)}_0 |psi^n|^2 + sum_k p^{(n)}_{n-k} v_k^2 - sum_{k<n} p^{(n-1)}_{n-1-k} v_k^2,
/// with v_k = sum_{j<=k} K^{(k)}_{k-j} psi^j. `holds` uses the tolerance
/// slack >= -tolerance.
QuadraticCheck check_quadratic_inequality(const KernelRows& weight_rows, const KernelRows& dcc_rows,
                                          std::span<const double> psi, double tolerance = 1e-10);

}  // namespace tfac
