#include "tfac/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tfac {

void validate(const ModelParams& params) {
  if (!(params.eps2 > 0.0) || !std::isfinite(params.eps2)) throw std::invalid_argument("model: eps2 must be positive");
  if (!(params.kappa >= 0.0) || !std::isfinite(params.kappa)) throw std::invalid_argument("model: kappa must be non-negative");
  if (!(params.alpha > 0.0 && params.alpha < 1.0)) throw std::invalid_argument("model: alpha must lie in (0, 1)");
}

namespace {

std::unique_ptr<HistoryEngine> make_engine(const ModelParams& params, const StateOptions& options, std::size_t width) {
  if (options.mode == SchemeMode::fast) {
    if (!options.soe) throw std::invalid_argument("SchemeState: fast mode needs an SOE approximation");
    if (std::abs(options.soe->alpha - params.alpha) > 1e-15) {
      throw std::invalid_argument("SchemeState: SOE was built for a different alpha");
    }
    return std::make_unique<SoeHistoryEngine>(*options.soe, width);
  }
  return make_direct_history(params.alpha, width, options.mesh ? &*options.mesh : nullptr, options.direct);
}

}  // namespace

SchemeState::SchemeState(const ModelParams& params, ScalarField phi0, StateOptions options)
    : params_(params),
      mode_(options.mode),
      soe_(std::move(options.soe)),
      planned_mesh_(std::move(options.mesh)),
      source_(std::move(options.source)),
      solver_(phi0.grid, params.eps2, options.solver),
      gamma_2ma_(std::tgamma(2.0 - params.alpha)),
      phi_(std::move(phi0)),
      phi_prev_(phi_),
      predictor_(phi_.grid),
      corrected_(phi_.grid),
      lalpha_(phi_.grid),
      times_{0.0} {
  validate(params_);
  StateOptions engine_options;
  engine_options.mode = mode_;
  engine_options.soe = soe_;
  engine_options.mesh = planned_mesh_;
  engine_options.direct = options.direct;
  history_ = make_engine(params_, engine_options, phi_.size());
  const std::size_t P = phi_.size();
  hist_.resize(P);
  rhs_.resize(P);
  work_.resize(P);
  if (source_) source_values_.resize(P);
}

void SchemeState::prepare(double t_next) {
  if (!(t_next > time()) || !std::isfinite(t_next)) {
    throw std::invalid_argument("step " + std::to_string(step()) + ": next time must exceed the current time");
  }
  if (t_next == t_next_) return;
  const double tau = t_next - time();
  a0_ = std::pow(tau, -params_.alpha) / gamma_2ma_;
  history_->history(t_next, hist_);
  if (source_) source_(t_next, source_values_);
  t_next_ = t_next;
}

void SchemeState::solve_with(std::span<const double> nonlinear_arg, ScalarField& out) {
  const std::size_t P = phi_.size();
  const double a0 = a0_, kappa = params_.kappa;
  const double* phi = phi_.values.data();
  const double* h = hist_.data();
  const double* s = source_ ? source_values_.data() : nullptr;
#pragma omp parallel for schedule(static) if (P > 32768)
  for (long pl = 0; pl < static_cast<long>(P); ++pl) {
    const auto p = static_cast<std::size_t>(pl);
    double r = a0 * phi[p] - h[p] - f_kappa_eval(nonlinear_arg[p], kappa);
    if (s) r += s[p];
    rhs_[p] = r;
  }
  try {
    solver_.solve(a0 + kappa, rhs_, out.values);
  } catch (const std::exception& e) {
    throw std::runtime_error("step " + std::to_string(step()) + " to t=" + std::to_string(t_next_) + ": " + e.what());
  }
}

// L^alpha_t Phi^{n+1} from the scheme residual
//   s - kappa Phi^{n+1} + eps2 Lap Phi^{n+1} - f_kappa(arg).
void SchemeState::accept(const ScalarField& next, std::span<const double> nonlinear_arg) {
  const std::size_t P = phi_.size();
  laplacian_apply(grid(), next.values, work_);
  const double kappa = params_.kappa, eps2 = params_.eps2;
  double sq = 0.0;
  for (std::size_t p = 0; p < P; ++p) {
    double v = -kappa * next[p] + eps2 * work_[p] - f_kappa_eval(nonlinear_arg[p], kappa);
    if (source_) v += source_values_[p];
    lalpha_[p] = v;
    sq += v * v;
  }
  for (std::size_t p = 0; p < P; ++p) work_[p] = next[p] - phi_[p];
  // After this point nonlinear_arg may alias Phi^n and is no longer read.
  history_->append(work_, time(), t_next_);

  std::swap(phi_prev_.values, phi_.values);
  std::copy(next.values.begin(), next.values.end(), phi_.values.begin());
  times_.push_back(t_next_);
  lalpha_log_.push_back(grid().cell_volume() * sq);
  t_next_ = -1.0;
}

const ScalarField& sfl1_step(SchemeState& state, double t_next) {
  state.prepare(t_next);
  state.solve_with(state.phi_.values, state.predictor_);
  return state.predictor_;
}

const ScalarField& pc_step(SchemeState& state, double t_next) {
  sfl1_step(state, t_next);
  state.solve_with(state.predictor_.values, state.corrected_);
  state.accept(state.corrected_, state.predictor_.values);
  return state.phi_;
}

const ScalarField& sfl1_advance(SchemeState& state, double t_next) {
  sfl1_step(state, t_next);
  // accept() reads the nonlinear argument before it overwrites Phi^n.
  state.accept(state.predictor_, state.phi_.values);
  return state.phi_;
}

const ScalarField& advance(SchemeState& state, SchemeType type, double t_next) {
  return type == SchemeType::pc ? pc_step(state, t_next) : sfl1_advance(state, t_next);
}

const ScalarField& advance(SchemeState& state, SchemeType type, const TemporalMesh& mesh) {
  const std::size_t n = state.step();
  if (n >= mesh.count()) throw std::out_of_range("advance: mesh exhausted");
  return advance(state, type, mesh.node(n + 1));
}

}  // namespace tfac
