#include "tfac/space_disc.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tfac {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void require_same(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

void require_size(const GridSpec& g, std::size_t n, const char* what) {
  if (n != g.size()) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(g.size()) + " values, got " +
                                std::to_string(n));
  }
}

std::size_t axis_stride(const GridSpec& g, int axis) {
  std::size_t s = 1;
  for (int a = 0; a < axis; ++a) s *= g.M;
  return s;
}

}  // namespace

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= M;
  return n;
}

double GridSpec::cell_volume() const { return std::pow(h(), dim); }

GridSpec make_grid(int dim, std::size_t M, double L) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  if (M < 2) throw std::invalid_argument("grid needs at least two cells per axis");
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("grid edge length must be positive");
  return GridSpec{dim, M, L};
}

ScalarField::ScalarField(const GridSpec& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  require_size(g, values.size(), "ScalarField");
}

void laplacian_apply(const GridSpec& g, std::span<const double> in, std::span<double> out) {
  require_size(g, in.size(), "laplacian_apply");
  require_size(g, out.size(), "laplacian_apply");
  const std::size_t M = g.M;
  const std::size_t lines = g.size() / M;
  const double ih2 = 1.0 / (g.h() * g.h());
#pragma omp parallel for schedule(static) if (g.size() > 32768)
  for (long line = 0; line < static_cast<long>(lines); ++line) {
    const std::size_t base = static_cast<std::size_t>(line) * M;
    // Index of this x-line along the slower axes.
    const std::size_t j = static_cast<std::size_t>(line) % M;
    const std::size_t k = static_cast<std::size_t>(line) / M;
    const double* u = in.data();
    for (std::size_t i = 0; i < M; ++i) {
      const std::size_t p = base + i;
      double acc = 0.0;
      if (i > 0) acc += u[p - 1] - u[p];
      if (i + 1 < M) acc += u[p + 1] - u[p];
      if (g.dim >= 2) {
        if (j > 0) acc += u[p - M] - u[p];
        if (j + 1 < M) acc += u[p + M] - u[p];
      }
      if (g.dim >= 3) {
        const std::size_t s = M * M;
        if (k > 0) acc += u[p - s] - u[p];
        if (k + 1 < M) acc += u[p + s] - u[p];
      }
      out[p] = acc * ih2;
    }
  }
}

ScalarField laplacian_apply(const ScalarField& field) {
  ScalarField out(field.grid);
  laplacian_apply(field.grid, field.values, out.values);
  return out;
}

double inner(const ScalarField& u, const ScalarField& v) {
  require_same(u.grid, v.grid, "inner");
  double s = 0.0;
  for (std::size_t p = 0; p < u.size(); ++p) s += u[p] * v[p];
  return u.grid.cell_volume() * s;
}

double norm_l2(const ScalarField& u) { return std::sqrt(inner(u, u)); }

double seminorm_h1_squared(const GridSpec& g, std::span<const double> u) {
  require_size(g, u.size(), "seminorm_h1");
  const std::size_t M = g.M;
  const std::size_t n = g.size();
  double s = 0.0;
  for (int axis = 0; axis < g.dim; ++axis) {
    const std::size_t stride = axis_stride(g, axis);
    for (std::size_t p = 0; p < n; ++p) {
      if ((p / stride) % M + 1 == M) continue;
      const double d = u[p + stride] - u[p];
      s += d * d;
    }
  }
  return g.cell_volume() * s / (g.h() * g.h());
}

double seminorm_h1(const ScalarField& u) { return std::sqrt(seminorm_h1_squared(u.grid, u.values)); }

double norm_max(std::span<const double> u) {
  double m = 0.0;
  for (double x : u) m = std::max(m, std::abs(x));
  return m;
}

double norm_max(const ScalarField& u) { return norm_max(u.span()); }

std::vector<double> neumann_eigenvalues_1d(const GridSpec& g) {
  std::vector<double> lam(g.M);
  const double h = g.h();
  for (std::size_t k = 0; k < g.M; ++k) {
    const double s = std::sin(static_cast<double>(k) * std::numbers::pi / (2.0 * static_cast<double>(g.M)));
    lam[k] = -4.0 / (h * h) * s * s;
  }
  return lam;
}

void helmholtz_apply(const GridSpec& g, double shift, double eps2, std::span<const double> u, std::span<double> out) {
  laplacian_apply(g, u, out);
  for (std::size_t p = 0; p < u.size(); ++p) out[p] = shift * u[p] - eps2 * out[p];
}

struct HelmholtzSolver::Transform {
  double* buffer = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::vector<double> lambda;  // eigenvalues of D_h in transform order
  double normalisation = 1.0;

  ~Transform() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    if (buffer) fftw_free(buffer);
  }
};

HelmholtzSolver::HelmholtzSolver(const GridSpec& grid, double eps2, HelmholtzMethod method)
    : grid_(make_grid(grid.dim, grid.M, grid.L)), eps2_(eps2), method_(method) {
  if (!(eps2 >= 0.0) || !std::isfinite(eps2)) throw std::invalid_argument("HelmholtzSolver: eps2 must be non-negative");
  if (method_ != HelmholtzMethod::cosine_transform) return;

  auto t = std::make_unique<Transform>();
  const std::size_t n = grid_.size();
  int dims[3];
  fftw_r2r_kind fwd[3], bwd[3];
  for (int a = 0; a < grid_.dim; ++a) {
    dims[a] = static_cast<int>(grid_.M);
    fwd[a] = FFTW_REDFT10;
    bwd[a] = FFTW_REDFT01;
  }
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    t->buffer = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    if (t->buffer) {
      t->forward = fftw_plan_r2r(grid_.dim, dims, t->buffer, t->buffer, fwd, FFTW_ESTIMATE);
      t->backward = fftw_plan_r2r(grid_.dim, dims, t->buffer, t->buffer, bwd, FFTW_ESTIMATE);
    }
  }
  if (!t->forward || !t->backward) {
    method_ = HelmholtzMethod::conjugate_gradient;
    return;
  }
  const auto lam1 = neumann_eigenvalues_1d(grid_);
  const std::size_t M = grid_.M;
  t->lambda.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    double s = 0.0;
    std::size_t q = p;
    for (int a = 0; a < grid_.dim; ++a) {
      s += lam1[q % M];
      q /= M;
    }
    t->lambda[p] = s;
  }
  t->normalisation = std::pow(2.0 * static_cast<double>(M), grid_.dim);
  transform_ = std::move(t);
}

HelmholtzSolver::~HelmholtzSolver() = default;
HelmholtzSolver::HelmholtzSolver(HelmholtzSolver&&) noexcept = default;
HelmholtzSolver& HelmholtzSolver::operator=(HelmholtzSolver&&) noexcept = default;

void HelmholtzSolver::solve(double shift, std::span<const double> rhs, std::span<double> out) {
  if (!(shift > 0.0) || !std::isfinite(shift)) throw std::invalid_argument("helmholtz_solve: shift must be positive");
  require_size(grid_, rhs.size(), "helmholtz_solve");
  require_size(grid_, out.size(), "helmholtz_solve");
  ++solves_;
  if (method_ == HelmholtzMethod::conjugate_gradient) {
    solve_cg(shift, rhs, out);
    return;
  }
  Transform& t = *transform_;
  const std::size_t n = rhs.size();
  std::copy(rhs.begin(), rhs.end(), t.buffer);
  fftw_execute(t.forward);
  for (std::size_t p = 0; p < n; ++p) t.buffer[p] /= (shift - eps2_ * t.lambda[p]) * t.normalisation;
  fftw_execute(t.backward);
  std::copy(t.buffer, t.buffer + n, out.begin());
}

ScalarField HelmholtzSolver::solve(double shift, const ScalarField& rhs) {
  require_same(grid_, rhs.grid, "helmholtz_solve");
  ScalarField out(grid_);
  solve(shift, rhs.values, out.values);
  return out;
}

void HelmholtzSolver::solve_cg(double shift, std::span<const double> rhs, std::span<double> x) {
  const std::size_t n = rhs.size();
  const double ih2 = 1.0 / (grid_.h() * grid_.h());
  const std::size_t M = grid_.M;
  std::vector<double> diag(n);
  for (std::size_t p = 0; p < n; ++p) {
    double neighbours = 0.0;
    std::size_t q = p;
    for (int a = 0; a < grid_.dim; ++a) {
      const std::size_t i = q % M;
      neighbours += (i == 0 || i + 1 == M) ? 1.0 : 2.0;
      q /= M;
    }
    diag[p] = shift + eps2_ * neighbours * ih2;
  }
  std::vector<double> r(rhs.begin(), rhs.end()), z(n), d(n), q(n);
  std::fill(x.begin(), x.end(), 0.0);
  double rhs_norm = 0.0;
  for (double v : rhs) rhs_norm += v * v;
  rhs_norm = std::sqrt(rhs_norm);
  if (rhs_norm == 0.0) return;
  const double target = 1e-12 * rhs_norm;
  for (std::size_t p = 0; p < n; ++p) z[p] = r[p] / diag[p];
  d = z;
  double rz = 0.0;
  for (std::size_t p = 0; p < n; ++p) rz += r[p] * z[p];
  const std::size_t max_iter = 20 * n + 100;
  for (std::size_t it = 0; it < max_iter; ++it) {
    helmholtz_apply(grid_, shift, eps2_, d, q);
    double dq = 0.0;
    for (std::size_t p = 0; p < n; ++p) dq += d[p] * q[p];
    const double step = rz / dq;
    double rr = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      x[p] += step * d[p];
      r[p] -= step * q[p];
      rr += r[p] * r[p];
    }
    if (std::sqrt(rr) <= target) {
      // Confirm against the true residual, which drifts from the recursive one.
      helmholtz_apply(grid_, shift, eps2_, x, q);
      double true_rr = 0.0;
      for (std::size_t p = 0; p < n; ++p) {
        r[p] = rhs[p] - q[p];
        true_rr += r[p] * r[p];
      }
      if (std::sqrt(true_rr) <= target) return;
    }
    for (std::size_t p = 0; p < n; ++p) z[p] = r[p] / diag[p];
    double rz_new = 0.0;
    for (std::size_t p = 0; p < n; ++p) rz_new += r[p] * z[p];
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t p = 0; p < n; ++p) d[p] = z[p] + beta * d[p];
  }
  throw std::runtime_error("helmholtz_solve: conjugate gradients did not reach the relative tolerance 1e-12");
}

}  // namespace tfac
