#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfac/l1_kernels.hpp"
#include "tfac/temporal_mesh.hpp"

namespace tfac {

enum class SoeQuadrature {
  /// Trapezoid rule in x after s = exp(x - e^{-x}); double-exponential decay
  /// at s -> 0 and plain exponential decay at s -> infinity.
  exponential_trapezoid,
  /// Gauss-Jacobi head on [0, 1/T] followed by Gauss-Legendre panels on
  /// dyadic intervals [2^j, 2^{j+1}] / T.
  dyadic_gauss_legendre,
};

struct SoeOptions {
  SoeQuadrature quadrature = SoeQuadrature::exponential_trapezoid;
  std::size_t scan_points = 10000;
  /// Reject tolerances above min(T^{-a}/(3 Gamma(1-a)), a/Gamma(2-a)).
  bool enforce_tolerance_cap = true;
};

/// t^{-alpha}/Gamma(1-alpha) ~ sum_i weights[i] exp(-nodes[i] t) on [delta, T].
struct SoeApproximation {
  double alpha = 0.0;
  double tol = 0.0;
  double delta = 0.0;
  double horizon = 0.0;
  std::vector<double> nodes;    ///< strictly increasing
  std::vector<double> weights;  ///< all positive
  double certified_error = 0.0;  ///< max scan error over [delta, T]

  std::size_t size() const { return nodes.size(); }
};

class SoeBuildError : public std::runtime_error {
 public:
  SoeBuildError(const std::string& what, double achieved) : std::runtime_error(what), achieved_(achieved) {}
  double achieved_error() const { return achieved_; }

 private:
  double achieved_;
};

double caputo_kernel(double t, double alpha);

double soe_tolerance_cap(double alpha, double horizon);

/// Throws invalid_argument for bad inputs or a tolerance above the cap, and
/// SoeBuildError when no quadrature depth reaches the tolerance.
SoeApproximation build_soe(double alpha, double tol, double delta, double horizon, const SoeOptions& options = {});

double eval_soe(const SoeApproximation& soe, double t);

/// max |kernel - soe| over `points` geometric samples of [delta, T] plus both ends.
double soe_scan_error(const SoeApproximation& soe, std::size_t points);

/// (1 - e^{-x}) / x with a Taylor branch below 1e-4.
double exp_mean(double x);

/// b_i = (1 - e^{-rho_i tau}) / (rho_i tau).
std::vector<double> step_coefficient(const SoeApproximation& soe, double tau);

/// Per-node accumulators H_i over `width` grid points, stored node-major.
class SoeHistory {
 public:
  SoeHistory(const SoeApproximation& soe, std::size_t width);

  std::size_t width() const { return width_; }
  std::size_t node_count() const { return rho_.size(); }

  /// H_i <- e^{-rho_i tau} H_i + b_i * diff.
  void update_history(std::span<const double> diff, double tau);

  /// out = sum_i omega_i e^{-rho_i tau_next} H_i.
  void evaluate(double tau_next, std::span<double> out) const;

  std::span<const double> accumulator(std::size_t i) const;
  const std::vector<double>& last_coefficients() const { return b_; }

 private:
  std::vector<double> rho_;
  std::vector<double> omega_;
  std::size_t width_;
  std::vector<double> h_;
  std::vector<double> b_;
  double b_tau_ = -1.0;
  std::vector<double> decay_;
  mutable std::vector<double> eval_coeff_;
  mutable double eval_tau_ = -1.0;
};

/// A^{(n)}_0 .. A^{(n)}_n with A^{(n)}_0 = a^{(n)}_0.
std::vector<double> fast_weights(const SoeApproximation& soe, const TemporalMesh& mesh, std::size_t n);

KernelRows fast_weight_rows(const SoeApproximation& soe, const TemporalMesh& mesh, std::size_t count);

}  // namespace tfac
