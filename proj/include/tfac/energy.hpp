#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tfac/history.hpp"
#include "tfac/schemes.hpp"
#include "tfac/space_disc.hpp"

namespace tfac {

/// E_h = (eps2/2) |Phi|_{1,h}^2 + h^d sum F(Phi).
double free_energy(const ScalarField& phi, const ModelParams& params);

/// E_h + (1/2) sum_{k<n} p^{(n-1)}_{n-1-k} g_k, with g_k = ||L^alpha_t Phi^{k+1}||_h^2
/// and dcc_row = p^{(n-1)}_0 .. p^{(n-1)}_{n-1}. n = 0 returns E_h.
/// The factor 1/2 is the one the quadratic kernel inequality supplies.
double variational_energy(double free_energy, std::span<const double> lalpha_log, std::span<const double> dcc_row,
                          std::size_t n);

struct MbpResult {
  double sup_norm = 0.0;
  bool violated = false;
};

constexpr double kMbpThreshold = 1.0 + 1e-12;

MbpResult mbp_check(std::span<const double> values);
inline MbpResult mbp_check(const ScalarField& phi) { return mbp_check(phi.span()); }

struct EnergyRow {
  std::size_t step = 0;
  double t = 0.0;
  double tau = 0.0;
  double sup_norm = 0.0;
  double E_h = 0.0;
  double E_alpha = 0.0;
  double dE_alpha = 0.0;
};

class EnergyLog {
 public:
  void append(const EnergyRow& row);
  const std::vector<EnergyRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  /// Header step,t,tau,sup_norm,E_h,E_alpha,dE_alpha; shortest round-trip decimals.
  std::string to_csv() const;
  void write_csv(const std::string& path) const;

 private:
  std::vector<EnergyRow> rows_;
};

/// Tracks the variational energy along a trajectory. The DCC-weighted sum is
/// carried as (1/2) sum_{j<=n} y_j, where y solves the lower-triangular system
/// sum_{k<=j} K^{(j)}_{j-k} y_k = g_j for the kernels K (a in direct mode, A
/// in fast mode), so each step costs one scalar history evaluation.
class EnergyMonitor {
 public:
  /// Uses the same kernel family as `state`; records the row for Phi^0.
  explicit EnergyMonitor(const SchemeState& state, double energy_rtol = 1e-10);

  /// Call once after every accepted step.
  const EnergyRow& observe(const SchemeState& state);

  const EnergyLog& log() const { return log_; }
  const EnergyRow& last() const { return log_.rows().back(); }
  /// Steps whose corrector or predictor left [-1 - 1e-12, 1 + 1e-12].
  std::size_t mbp_violations() const { return mbp_violations_; }
  std::size_t energy_violations() const { return energy_violations_; }
  /// Step indices of the first few energy increases.
  const std::vector<std::size_t>& energy_violation_steps() const { return energy_violation_steps_; }
  /// Monitoring of the MBP is off when Phi^0 already leaves [-1, 1].
  bool mbp_monitored() const { return mbp_monitored_; }
  /// Running (1/2) sum_{j<n} y_j.
  double history_energy() const { return history_sum_; }
  /// Increases of E_h + sum_{j<n} y_j, the same energy without the 1/2.
  std::size_t unhalved_violations() const { return unhalved_violations_; }

 private:
  ModelParams params_;
  double rtol_;
  double gamma_2ma_;
  std::unique_ptr<HistoryEngine> engine_;
  EnergyLog log_;
  double history_sum_ = 0.0;
  std::size_t mbp_violations_ = 0;
  std::size_t energy_violations_ = 0;
  std::size_t unhalved_violations_ = 0;
  double unhalved_prev_ = 0.0;
  std::vector<std::size_t> energy_violation_steps_;
  bool mbp_monitored_ = true;
};

}  // namespace tfac
