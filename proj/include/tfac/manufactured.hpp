#pragma once

#include <cstdint>
#include <span>

#include "tfac/schemes.hpp"
#include "tfac/space_disc.hpp"

namespace tfac {

/// Exact solution phi = 0.2 (t^mu + 1) C(x), C the product of cos over the
/// grid axes, and the source that makes it solve the model equation.
struct ManufacturedCase {
  double mu = 0.5;
  ModelParams params;
  int dim = 2;

  double amplitude(double t) const;
  double exact(double x, double y, double z, double t) const;
  /// s = 0.2 Gamma(mu+1)/Gamma(mu+1-a) t^{mu-a} C + dim eps2 phi + f(phi).
  double source(double x, double y, double z, double t) const;

  ScalarField exact_field(const GridSpec& grid, double t) const;
  /// Source callback with the cosine product tabulated once.
  SourceTerm source_term(const GridSpec& grid) const;
};

/// s(x, t) of the manufactured case at one point.
double manufactured_source(double x, double y, double z, double t, double mu, const ModelParams& params, int dim);

/// SplitMix64 finaliser.
std::uint64_t splitmix64(std::uint64_t x);

/// Uniform on [-amplitude, amplitude]; the value at cell p depends only on
/// (seed, p), through splitmix64(seed + (p + 1) * 0x9E3779B97F4A7C15).
ScalarField random_uniform_field(const GridSpec& grid, double amplitude, std::uint64_t seed);

}  // namespace tfac
