#include "tfac/manufactured.hpp"

#include <cmath>
#include <stdexcept>

namespace tfac {

namespace {

double cos_product(double x, double y, double z, int dim) {
  double c = std::cos(x);
  if (dim >= 2) c *= std::cos(y);
  if (dim >= 3) c *= std::cos(z);
  return c;
}

double caputo_factor(double t, double mu, double alpha) {
  if (t <= 0.0) {
    if (mu > alpha) return 0.0;
    throw std::domain_error("manufactured source: t^{mu - alpha} is singular at t = 0");
  }
  return std::tgamma(mu + 1.0) / std::tgamma(mu + 1.0 - alpha) * std::pow(t, mu - alpha);
}

}  // namespace

double ManufacturedCase::amplitude(double t) const { return 0.2 * (std::pow(t, mu) + 1.0); }

double ManufacturedCase::exact(double x, double y, double z, double t) const {
  return amplitude(t) * cos_product(x, y, z, dim);
}

double manufactured_source(double x, double y, double z, double t, double mu, const ModelParams& params, int dim) {
  if (t < 0.0) throw std::domain_error("manufactured source: t must be non-negative");
  const double c = cos_product(x, y, z, dim);
  const double phi = 0.2 * (std::pow(t, mu) + 1.0) * c;
  return 0.2 * caputo_factor(t, mu, params.alpha) * c + dim * params.eps2 * phi + f_eval(phi);
}

double ManufacturedCase::source(double x, double y, double z, double t) const {
  return manufactured_source(x, y, z, t, mu, params, dim);
}

ScalarField ManufacturedCase::exact_field(const GridSpec& grid, double t) const {
  if (grid.dim != dim) throw std::invalid_argument("ManufacturedCase: grid dimension mismatch");
  return sample(grid, [&](double x, double y, double z) { return exact(x, y, z, t); });
}

SourceTerm ManufacturedCase::source_term(const GridSpec& grid) const {
  if (grid.dim != dim) throw std::invalid_argument("ManufacturedCase: grid dimension mismatch");
  auto c = std::make_shared<std::vector<double>>(
      sample(grid, [&](double x, double y, double z) { return cos_product(x, y, z, dim); }).values);
  const ManufacturedCase self = *this;
  return [self, c](double t, std::span<double> out) {
    const double frac = 0.2 * caputo_factor(t, self.mu, self.params.alpha);
    const double amp = self.amplitude(t);
    const double lin = self.dim * self.params.eps2;
    const auto& cv = *c;
    for (std::size_t p = 0; p < out.size(); ++p) {
      const double phi = amp * cv[p];
      out[p] = frac * cv[p] + lin * phi + f_eval(phi);
    }
  };
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

ScalarField random_uniform_field(const GridSpec& grid, double amplitude, std::uint64_t seed) {
  ScalarField f(grid);
  for (std::size_t p = 0; p < f.size(); ++p) {
    const std::uint64_t r = splitmix64(seed + (static_cast<std::uint64_t>(p) + 1) * 0x9E3779B97F4A7C15ULL);
    const double u = static_cast<double>(r >> 11) * 0x1.0p-53;
    f[p] = amplitude * (2.0 * u - 1.0);
  }
  return f;
}

}  // namespace tfac
