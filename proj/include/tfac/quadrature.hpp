#pragma once

#include <cstddef>
#include <vector>

namespace tfac {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
QuadratureRule gauss_legendre(std::size_t n);

/// n-point Gauss-Jacobi rule on [0, 1] for the weight u^{b}, b > -1
/// (Golub-Welsch on the shifted Jacobi recurrence).
QuadratureRule gauss_jacobi_left(std::size_t n, double b);

}  // namespace tfac
