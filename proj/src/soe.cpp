#include "tfac/soe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <sstream>

#include "tfac/quadrature.hpp"

namespace tfac {

namespace {

constexpr std::size_t kBlock = 512;

struct RawRule {
  std::vector<double> rho;
  std::vector<double> omega;
};

// Work on the rescaled interval t' = t / T in [d, 1] with tolerance tl; the
// kernel scales as T^{-alpha} so rho = rho' / T and omega = omega' T^{-alpha}.

double lower_tail(double s, double alpha, double c) { return c * std::pow(s, alpha) / alpha; }

double upper_tail(double s, double alpha, double c, double d) {
  return c * std::pow(s, alpha - 1.0) * std::exp(-s * d) / d;
}

RawRule trapezoid_rule(double alpha, double d, double tl, double h) {
  const double c = std::sin(std::numbers::pi * alpha) / std::numbers::pi;
  auto s_of = [](double x) { return std::exp(x - std::exp(-x)); };
  long k_lo = 0;
  while (lower_tail(s_of(static_cast<double>(k_lo) * h), alpha, c) > tl / 8.0) --k_lo;
  long k_hi = 0;
  for (;;) {
    const double s = s_of(static_cast<double>(k_hi) * h);
    if (s * d > 1.0 && upper_tail(s, alpha, c, d) <= tl / 8.0) break;
    ++k_hi;
  }
  RawRule r;
  for (long k = k_lo; k <= k_hi; ++k) {
    const double x = static_cast<double>(k) * h;
    const double s = s_of(x);
    r.rho.push_back(s);
    r.omega.push_back(c * h * std::pow(s, alpha) * (1.0 + std::exp(-x)));
  }
  return r;
}

RawRule dyadic_rule(double alpha, double d, double tl, std::size_t depth) {
  const double c = std::sin(std::numbers::pi * alpha) / std::numbers::pi;
  RawRule r;
  const QuadratureRule head = gauss_jacobi_left(depth, alpha - 1.0);
  for (std::size_t j = 0; j < depth; ++j) {
    r.rho.push_back(head.nodes[j]);
    r.omega.push_back(c * head.weights[j]);
  }
  const QuadratureRule gl = gauss_legendre(depth);
  double lo = 1.0;
  for (;;) {
    const double hi = 2.0 * lo;
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (std::size_t j = 0; j < depth; ++j) {
      const double s = mid + half * gl.nodes[j];
      r.rho.push_back(s);
      r.omega.push_back(c * half * gl.weights[j] * std::pow(s, alpha - 1.0));
    }
    lo = hi;
    if (lo * d > 1.0 && upper_tail(lo, alpha, c, d) <= tl / 8.0) break;
  }
  return r;
}

// Drops the smallest contributions omega e^{-rho d} while their sum stays within budget.
RawRule prune(const RawRule& r, double d, double budget) {
  std::vector<std::size_t> order(r.rho.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> contrib(r.rho.size());
  for (std::size_t i = 0; i < r.rho.size(); ++i) contrib[i] = r.omega[i] * std::exp(-r.rho[i] * d);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return contrib[a] < contrib[b]; });
  std::vector<bool> keep(r.rho.size(), true);
  double dropped = 0.0;
  for (std::size_t i : order) {
    if (dropped + contrib[i] > budget) break;
    dropped += contrib[i];
    keep[i] = false;
  }
  RawRule out;
  for (std::size_t i = 0; i < r.rho.size(); ++i) {
    if (!keep[i] || !(r.omega[i] > 0.0)) continue;
    out.rho.push_back(r.rho[i]);
    out.omega.push_back(r.omega[i]);
  }
  std::vector<std::size_t> idx(out.rho.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return out.rho[a] < out.rho[b]; });
  RawRule sorted;
  for (std::size_t i : idx) {
    sorted.rho.push_back(out.rho[i]);
    sorted.omega.push_back(out.omega[i]);
  }
  return sorted;
}

}  // namespace

double caputo_kernel(double t, double alpha) { return std::pow(t, -alpha) / std::tgamma(1.0 - alpha); }

double soe_tolerance_cap(double alpha, double horizon) {
  return std::min(std::pow(horizon, -alpha) / (3.0 * std::tgamma(1.0 - alpha)), alpha / std::tgamma(2.0 - alpha));
}

SoeApproximation build_soe(double alpha, double tol, double delta, double horizon, const SoeOptions& options) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("build_soe: alpha must lie in (0, 1)");
  if (!(delta > 0.0) || !(delta < horizon) || !std::isfinite(horizon)) {
    throw std::invalid_argument("build_soe: need 0 < delta < T");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("build_soe: tolerance must be positive");
  const double cap = soe_tolerance_cap(alpha, horizon);
  if (options.enforce_tolerance_cap && tol > cap) {
    std::ostringstream msg;
    msg << "build_soe: tolerance " << tol << " exceeds min(T^-a/(3 Gamma(1-a)), a/Gamma(2-a)) = " << cap
        << " for alpha=" << alpha << ", T=" << horizon << "; the fast-kernel positivity and energy bounds need it";
    throw std::invalid_argument(msg.str());
  }
  if (options.scan_points < 2) throw std::invalid_argument("build_soe: scan needs at least two points");

  const double d = delta / horizon;
  const double tl = tol * std::pow(horizon, alpha);
  const double rho_scale = 1.0 / horizon;
  const double omega_scale = std::pow(horizon, -alpha);

  auto finish = [&](const RawRule& raw) {
    const RawRule pruned = prune(raw, d, tl / 10.0);
    SoeApproximation soe;
    soe.alpha = alpha;
    soe.tol = tol;
    soe.delta = delta;
    soe.horizon = horizon;
    soe.nodes.reserve(pruned.rho.size());
    soe.weights.reserve(pruned.rho.size());
    for (std::size_t i = 0; i < pruned.rho.size(); ++i) {
      soe.nodes.push_back(pruned.rho[i] * rho_scale);
      soe.weights.push_back(pruned.omega[i] * omega_scale);
    }
    soe.certified_error = soe_scan_error(soe, options.scan_points);
    return soe;
  };

  double best = std::numeric_limits<double>::infinity();
  if (options.quadrature == SoeQuadrature::exponential_trapezoid) {
    for (double h : {0.4, 0.35, 0.3, 0.25, 0.2, 0.15, 0.12, 0.1, 0.08, 0.06, 0.05}) {
      SoeApproximation soe = finish(trapezoid_rule(alpha, d, tl, h));
      if (soe.certified_error <= tol) return soe;
      best = std::min(best, soe.certified_error);
    }
  } else {
    for (std::size_t depth = 6; depth <= 30; depth += 2) {
      SoeApproximation soe = finish(dyadic_rule(alpha, d, tl, depth));
      if (soe.certified_error <= tol) return soe;
      best = std::min(best, soe.certified_error);
    }
  }
  std::ostringstream msg;
  msg << "build_soe: tolerance " << tol << " not reached at the finest quadrature depth (achieved " << best << ")";
  throw SoeBuildError(msg.str(), best);
}

double eval_soe(const SoeApproximation& soe, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("eval_soe: t must be positive");
  double s = 0.0;
  for (std::size_t i = 0; i < soe.nodes.size(); ++i) s += soe.weights[i] * std::exp(-soe.nodes[i] * t);
  return s;
}

double soe_scan_error(const SoeApproximation& soe, std::size_t points) {
  const double log_lo = std::log(soe.delta);
  const double log_hi = std::log(soe.horizon);
  double worst = 0.0;
  auto probe = [&](double t) { worst = std::max(worst, std::abs(caputo_kernel(t, soe.alpha) - eval_soe(soe, t))); };
  probe(soe.delta);
  probe(soe.horizon);
  const auto denom = static_cast<double>(points - 1);
  for (std::size_t j = 1; j + 1 < points; ++j) {
    probe(std::exp(log_lo + (log_hi - log_lo) * (static_cast<double>(j) / denom)));
  }
  return worst;
}

double exp_mean(double x) {
  if (x < 1e-4) return 1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0;
  return -std::expm1(-x) / x;
}

std::vector<double> step_coefficient(const SoeApproximation& soe, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("step_coefficient: tau must be positive");
  std::vector<double> b(soe.nodes.size());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = exp_mean(soe.nodes[i] * tau);
  return b;
}

SoeHistory::SoeHistory(const SoeApproximation& soe, std::size_t width)
    : rho_(soe.nodes), omega_(soe.weights), width_(width), h_(soe.nodes.size() * width, 0.0) {
  if (width == 0) throw std::invalid_argument("SoeHistory: width must be positive");
}

void SoeHistory::update_history(std::span<const double> diff, double tau) {
  if (diff.size() != width_) throw std::invalid_argument("update_history: field size does not match history width");
  if (!(tau > 0.0)) throw std::invalid_argument("update_history: tau must be positive");
  if (tau != b_tau_) {
    b_.resize(rho_.size());
    decay_.resize(rho_.size());
    for (std::size_t i = 0; i < rho_.size(); ++i) {
      b_[i] = exp_mean(rho_[i] * tau);
      decay_[i] = std::exp(-rho_[i] * tau);
    }
    b_tau_ = tau;
  }
  const std::size_t nodes = rho_.size();
  const std::size_t w = width_;
  const auto blocks = static_cast<long>((w + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static) if (nodes * w > 65536)
  for (long blk = 0; blk < blocks; ++blk) {
    const std::size_t p0 = static_cast<std::size_t>(blk) * kBlock;
    const std::size_t p1 = std::min(w, p0 + kBlock);
    for (std::size_t i = 0; i < nodes; ++i) {
      double* h = h_.data() + i * w;
      const double e = decay_[i], b = b_[i];
      for (std::size_t p = p0; p < p1; ++p) h[p] = e * h[p] + b * diff[p];
    }
  }
}

void SoeHistory::evaluate(double tau_next, std::span<double> out) const {
  if (out.size() != width_) throw std::invalid_argument("SoeHistory::evaluate: output size does not match width");
  if (tau_next != eval_tau_) {
    eval_coeff_.resize(rho_.size());
    for (std::size_t i = 0; i < rho_.size(); ++i) eval_coeff_[i] = omega_[i] * std::exp(-rho_[i] * tau_next);
    eval_tau_ = tau_next;
  }
  const std::size_t nodes = rho_.size();
  const std::size_t w = width_;
  const auto blocks = static_cast<long>((w + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static) if (nodes * w > 65536)
  for (long blk = 0; blk < blocks; ++blk) {
    const std::size_t p0 = static_cast<std::size_t>(blk) * kBlock;
    const std::size_t p1 = std::min(w, p0 + kBlock);
    for (std::size_t p = p0; p < p1; ++p) out[p] = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) {
      const double* h = h_.data() + i * w;
      const double c = eval_coeff_[i];
      for (std::size_t p = p0; p < p1; ++p) out[p] += c * h[p];
    }
  }
}

std::span<const double> SoeHistory::accumulator(std::size_t i) const {
  if (i >= rho_.size()) throw std::out_of_range("SoeHistory::accumulator: node index out of range");
  return {h_.data() + i * width_, width_};
}

std::vector<double> fast_weights(const SoeApproximation& soe, const TemporalMesh& mesh, std::size_t n) {
  if (n >= mesh.count()) throw std::invalid_argument("fast_weights: row index must be below N");
  std::vector<double> a(n + 1);
  a[0] = l1_interval_weight(0.0, mesh.tau(n + 1), soe.alpha, std::tgamma(2.0 - soe.alpha));
  const double target = mesh.node(n + 1);
  for (std::size_t k = 0; k < n; ++k) {
    const double gap = target - mesh.node(k + 1);
    const double tau = mesh.tau(k + 1);
    double s = 0.0;
    for (std::size_t i = 0; i < soe.nodes.size(); ++i) {
      s += soe.weights[i] * std::exp(-soe.nodes[i] * gap) * exp_mean(soe.nodes[i] * tau);
    }
    a[n - k] = s;
  }
  return a;
}

KernelRows fast_weight_rows(const SoeApproximation& soe, const TemporalMesh& mesh, std::size_t count) {
  KernelRows rows;
  rows.reserve(count);
  for (std::size_t n = 0; n < count; ++n) rows.push_back(fast_weights(soe, mesh, n));
  return rows;
}

}  // namespace tfac
