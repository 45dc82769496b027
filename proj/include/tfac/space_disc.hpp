#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace tfac {

/// Uniform cell-centred grid on (0, L)^d with M cells per axis. Cell centres
/// sit at (i - 1/2) h; values are stored x-fastest.
struct GridSpec {
  int dim = 2;
  std::size_t M = 0;
  double L = 1.0;

  double h() const { return L / static_cast<double>(M); }
  std::size_t size() const;
  /// h^d, the cell volume.
  double cell_volume() const;
  bool operator==(const GridSpec&) const = default;
};

/// Throws invalid_argument unless dim is 1, 2 or 3, M >= 2 and L > 0.
GridSpec make_grid(int dim, std::size_t M, double L);

struct ScalarField {
  GridSpec grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const GridSpec& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  ScalarField(const GridSpec& g, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::span<double> span() { return values; }
  std::span<const double> span() const { return values; }
};

/// Cell centre coordinate along one axis for index i (0-based).
inline double cell_center(const GridSpec& g, std::size_t i) { return (static_cast<double>(i) + 0.5) * g.h(); }

/// Samples fn(x, y, z) at cell centres; unused coordinates are passed as 0.
template <class Fn>
ScalarField sample(const GridSpec& g, Fn&& fn) {
  ScalarField f(g);
  const std::size_t M = g.M;
  const std::size_t ny = g.dim >= 2 ? M : 1, nz = g.dim >= 3 ? M : 1;
  std::size_t p = 0;
  for (std::size_t k = 0; k < nz; ++k) {
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t i = 0; i < M; ++i, ++p) {
        f.values[p] = fn(cell_center(g, i), g.dim >= 2 ? cell_center(g, j) : 0.0, g.dim >= 3 ? cell_center(g, k) : 0.0);
      }
    }
  }
  return f;
}

/// Discrete Neumann Laplacian (1/h^2) sum_axes G, G = tridiag(1, -2, 1) with
/// -1 in both corner entries.
void laplacian_apply(const GridSpec& grid, std::span<const double> in, std::span<double> out);
ScalarField laplacian_apply(const ScalarField& field);

/// <U, V> = h^d sum U V.
double inner(const ScalarField& u, const ScalarField& v);
double norm_l2(const ScalarField& u);
/// sqrt(h^d sum over interior edges of (difference / h)^2).
double seminorm_h1(const ScalarField& u);
double seminorm_h1_squared(const GridSpec& grid, std::span<const double> u);
/// Pointwise maximum of |U|.
double norm_max(std::span<const double> u);
double norm_max(const ScalarField& u);

/// -(4/h^2) sin^2(k pi / (2M)) for k = 0..M-1.
std::vector<double> neumann_eigenvalues_1d(const GridSpec& grid);

/// y = shift * u - eps2 * Lap u.
void helmholtz_apply(const GridSpec& grid, double shift, double eps2, std::span<const double> u, std::span<double> out);

enum class HelmholtzMethod { cosine_transform, conjugate_gradient };

/// Solves (shift I - eps2 D_h) u = rhs. The cosine transform diagonalises D_h
/// for any shift; conjugate gradients (Jacobi preconditioned, relative
/// tolerance 1e-12) is used when the transform cannot be planned or when
/// requested explicitly.
class HelmholtzSolver {
 public:
  HelmholtzSolver(const GridSpec& grid, double eps2, HelmholtzMethod method = HelmholtzMethod::cosine_transform);
  ~HelmholtzSolver();
  HelmholtzSolver(HelmholtzSolver&&) noexcept;
  HelmholtzSolver& operator=(HelmholtzSolver&&) noexcept;
  HelmholtzSolver(const HelmholtzSolver&) = delete;
  HelmholtzSolver& operator=(const HelmholtzSolver&) = delete;

  /// Throws invalid_argument for a non-positive shift or mismatched sizes,
  /// runtime_error if conjugate gradients fail to converge.
  void solve(double shift, std::span<const double> rhs, std::span<double> out);
  ScalarField solve(double shift, const ScalarField& rhs);

  const GridSpec& grid() const { return grid_; }
  double eps2() const { return eps2_; }
  HelmholtzMethod method() const { return method_; }
  std::size_t solve_count() const { return solves_; }
  void reset_solve_count() { solves_ = 0; }

 private:
  struct Transform;
  void solve_cg(double shift, std::span<const double> rhs, std::span<double> out);

  GridSpec grid_;
  double eps2_;
  HelmholtzMethod method_;
  std::unique_ptr<Transform> transform_;
  std::size_t solves_ = 0;
};

}  // namespace tfac
