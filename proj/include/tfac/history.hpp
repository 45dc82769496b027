#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "tfac/soe.hpp"
#include "tfac/temporal_mesh.hpp"

namespace tfac {

/// Convolution history sum_{k<n} K^{(n)}_{n-k} x_k over recorded increments
/// x_k living on [t_k, t_{k+1}], evaluated at a target time t_{n+1}.
class HistoryEngine {
 public:
  virtual ~HistoryEngine() = default;

  virtual std::size_t width() const = 0;
  virtual std::size_t steps() const = 0;

  /// Records the next increment on [t_left, t_right]; t_left must equal the
  /// previous t_right.
  virtual void append(std::span<const double> increment, double t_left, double t_right) = 0;

  /// Writes the history sum at t_target > last recorded t_right.
  virtual void history(double t_target, std::span<double> out) = 0;

  /// Number of doubles held, for memory accounting.
  virtual std::size_t stored_values() const = 0;
};

/// Exact L1 weights summed term by term; O(n) work per evaluation.
class DirectSumHistory final : public HistoryEngine {
 public:
  DirectSumHistory(double alpha, std::size_t width);

  /// Reserves storage for `count` increments so long runs never reallocate.
  void reserve(std::size_t count);

  std::size_t width() const override { return width_; }
  std::size_t steps() const override { return nodes_.size() - 1; }
  void append(std::span<const double> increment, double t_left, double t_right) override;
  void history(double t_target, std::span<double> out) override;
  std::size_t stored_values() const override { return increments_.capacity() + nodes_.capacity(); }

 private:
  double alpha_;
  double gamma_2ma_;
  std::size_t width_;
  std::vector<double> nodes_;
  std::vector<double> increments_;
  std::vector<double> weights_;
};

/// Exact L1 weights for a mesh whose tail is uniform. Increments on the
/// non-uniform head are summed directly; on the uniform tail the weights
/// depend only on the index distance d, and the Toeplitz sum is evaluated
/// online: distances below 32 directly, each band [D, 2D) with D = 32 * 2^l
/// by block FFT correlation performed once every D steps.
class ToeplitzHistory final : public HistoryEngine {
 public:
  ToeplitzHistory(double alpha, std::size_t width, const TemporalMesh& mesh);
  ~ToeplitzHistory() override;

  std::size_t width() const override { return width_; }
  std::size_t steps() const override { return steps_; }
  void append(std::span<const double> increment, double t_left, double t_right) override;
  void history(double t_target, std::span<double> out) override;
  std::size_t stored_values() const override;

  std::size_t tail_start() const { return tail_start_; }

 private:
  struct Level;
  void run_level(Level& level, std::size_t m0);
  double tail_kernel(std::size_t d) const;

  double alpha_;
  double gamma_2ma_;
  std::size_t width_;
  TemporalMesh mesh_;
  std::size_t tail_start_;
  double tail_step_;
  std::size_t tail_outputs_;  // number of tail evaluations m = 0 .. tail_outputs_ - 1
  std::size_t steps_ = 0;
  std::size_t prepared_ = 0;  // tail output m is prepared when prepared_ == m + 1
  std::vector<double> increments_;
  std::vector<double> near_kernel_;
  std::vector<std::unique_ptr<Level>> levels_;
  std::size_t ring_rows_ = 0;
  std::vector<double> ring_;
  double* work_real_ = nullptr;
  void* work_complex_ = nullptr;
  std::size_t work_points_ = 0;
};

/// Sum-of-exponentials history (fast kernels A).
class SoeHistoryEngine final : public HistoryEngine {
 public:
  SoeHistoryEngine(const SoeApproximation& soe, std::size_t width);

  std::size_t width() const override { return history_.width(); }
  std::size_t steps() const override { return steps_; }
  void append(std::span<const double> increment, double t_left, double t_right) override;
  void history(double t_target, std::span<double> out) override;
  std::size_t stored_values() const override { return history_.node_count() * history_.width(); }

  const SoeHistory& state() const { return history_; }

 private:
  SoeHistory history_;
  std::size_t steps_ = 0;
  double last_ = 0.0;
};

enum class DirectEvaluation { automatic, sum, toeplitz };

/// Direct-mode engine: Toeplitz when requested, or automatically when a mesh
/// is given and its uniform tail is long enough to pay off; otherwise the
/// plain sum.
std::unique_ptr<HistoryEngine> make_direct_history(double alpha, std::size_t width, const TemporalMesh* mesh,
                                                   DirectEvaluation choice = DirectEvaluation::automatic);

}  // namespace tfac
