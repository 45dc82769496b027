#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "tfac/history.hpp"
#include "tfac/soe.hpp"
#include "tfac/space_disc.hpp"
#include "tfac/temporal_mesh.hpp"

namespace tfac {

/// Double-well Allen-Cahn model with stabilization kappa.
struct ModelParams {
  double eps2 = 1e-3;
  double kappa = 2.0;
  double alpha = 0.5;
};

/// Throws invalid_argument unless eps2 > 0, kappa >= 0 and alpha in (0, 1).
void validate(const ModelParams& params);

/// f = phi^3 - phi.
inline double f_eval(double phi) { return phi * phi * phi - phi; }
/// f_kappa = phi^3 - (1 + kappa) phi.
inline double f_kappa_eval(double phi, double kappa) { return phi * phi * phi - (1.0 + kappa) * phi; }
/// F = (phi^2 - 1)^2 / 4.
inline double potential_F(double phi) {
  const double q = phi * phi - 1.0;
  return 0.25 * q * q;
}

enum class SchemeType { sfl1, pc };
enum class SchemeMode { direct, fast };

/// Writes s(x, t) at every cell, x-fastest.
using SourceTerm = std::function<void(double t, std::span<double> out)>;

struct StateOptions {
  SchemeMode mode = SchemeMode::fast;
  /// Required in fast mode.
  std::optional<SoeApproximation> soe;
  /// Planned mesh, if known; lets direct mode use the Toeplitz engine.
  std::optional<TemporalMesh> mesh;
  DirectEvaluation direct = DirectEvaluation::automatic;
  HelmholtzMethod solver = HelmholtzMethod::cosine_transform;
  SourceTerm source;
};

/// Evolving state of one simulation: Phi^n, Phi^{n-1}, the convolution
/// history of the increments Phi^{k+1} - Phi^k and the log of
/// ||L^alpha_t Phi^{k+1}||_h^2.
class SchemeState {
 public:
  SchemeState(const ModelParams& params, ScalarField phi0, StateOptions options = {});

  const ModelParams& params() const { return params_; }
  const GridSpec& grid() const { return phi_.grid; }
  SchemeMode mode() const { return mode_; }
  const std::optional<SoeApproximation>& soe() const { return soe_; }
  const std::optional<TemporalMesh>& planned_mesh() const { return planned_mesh_; }

  std::size_t step() const { return times_.size() - 1; }
  double time() const { return times_.back(); }
  const std::vector<double>& times() const { return times_; }

  const ScalarField& phi() const { return phi_; }
  const ScalarField& phi_prev() const { return phi_prev_; }
  /// Predictor from the most recent sfl1_step call.
  const ScalarField& predictor() const { return predictor_; }
  /// L^alpha_t Phi^n of the latest accepted step (zero before the first).
  const ScalarField& lalpha() const { return lalpha_; }
  /// ||L^alpha_t Phi^{k+1}||_h^2 for k = 0 .. n-1.
  const std::vector<double>& lalpha_log() const { return lalpha_log_; }

  HelmholtzSolver& solver() { return solver_; }
  const HistoryEngine& history() const { return *history_; }
  /// Doubles held by the convolution history.
  std::size_t history_values() const { return history_->stored_values(); }

 private:
  friend const ScalarField& sfl1_step(SchemeState& state, double t_next);
  friend const ScalarField& pc_step(SchemeState& state, double t_next);
  friend const ScalarField& sfl1_advance(SchemeState& state, double t_next);

  void prepare(double t_next);
  void solve_with(std::span<const double> nonlinear_arg, ScalarField& out);
  void accept(const ScalarField& next, std::span<const double> nonlinear_arg);

  ModelParams params_;
  SchemeMode mode_;
  std::optional<SoeApproximation> soe_;
  std::optional<TemporalMesh> planned_mesh_;
  SourceTerm source_;
  HelmholtzSolver solver_;
  std::unique_ptr<HistoryEngine> history_;
  double gamma_2ma_;

  ScalarField phi_, phi_prev_, predictor_, corrected_, lalpha_;
  std::vector<double> times_;
  std::vector<double> lalpha_log_;

  // Data for the step being prepared.
  double t_next_ = -1.0;
  double a0_ = 0.0;
  std::vector<double> hist_, source_values_, rhs_, work_;
};

/// Solves (a0 + kappa) Phi - eps2 Lap Phi = a0 Phi^n - history - f_kappa(Phi^n) + s
/// for the first-order predictor at t_next; the state is not advanced.
const ScalarField& sfl1_step(SchemeState& state, double t_next);

/// Predictor-corrector step: predictor, then the same system with
/// f_kappa(predictor). Advances the state to t_next.
const ScalarField& pc_step(SchemeState& state, double t_next);

/// First-order scheme: accepts the predictor as Phi^{n+1}.
const ScalarField& sfl1_advance(SchemeState& state, double t_next);

const ScalarField& advance(SchemeState& state, SchemeType type, double t_next);

/// Steps on the mesh at index state.step() + 1.
const ScalarField& advance(SchemeState& state, SchemeType type, const TemporalMesh& mesh);

}  // namespace tfac
