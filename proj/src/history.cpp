#include "tfac/history.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>

#include "tfac/l1_kernels.hpp"

namespace tfac {

namespace {

constexpr std::size_t kBlock = 512;
constexpr std::size_t kNearBand = 32;
constexpr std::size_t kWorkBudget = std::size_t{1} << 20;  // doubles per work buffer

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void require_width(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) throw std::invalid_argument(std::string(what) + ": increment size does not match history width");
}

// out[p] += sum_k w[k] * x[k * width + p] for p in [0, width).
void weighted_sum(const std::vector<double>& w, const double* x, std::size_t width, std::span<double> out,
                  std::size_t k_begin = 0) {
  const std::size_t count = w.size();
  const auto blocks = static_cast<long>((width + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static) if (width * count > 262144)
  for (long blk = 0; blk < blocks; ++blk) {
    const std::size_t p0 = static_cast<std::size_t>(blk) * kBlock;
    const std::size_t p1 = std::min(width, p0 + kBlock);
    for (std::size_t k = 0; k < count; ++k) {
      const double wk = w[k];
      const double* row = x + (k_begin + k) * width;
      for (std::size_t p = p0; p < p1; ++p) out[p] += wk * row[p];
    }
  }
}

}  // namespace

DirectSumHistory::DirectSumHistory(double alpha, std::size_t width)
    : alpha_(alpha), gamma_2ma_(std::tgamma(2.0 - alpha)), width_(width) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("history: alpha must lie in (0, 1)");
  if (width == 0) throw std::invalid_argument("history: width must be positive");
  nodes_.push_back(0.0);
}

void DirectSumHistory::reserve(std::size_t count) {
  increments_.reserve(count * width_);
  nodes_.reserve(count + 1);
}

void DirectSumHistory::append(std::span<const double> increment, double t_left, double t_right) {
  require_width(width_, increment.size(), "DirectSumHistory::append");
  if (t_left != nodes_.back() || !(t_right > t_left)) throw std::invalid_argument("DirectSumHistory::append: intervals must be contiguous");
  nodes_.push_back(t_right);
  increments_.insert(increments_.end(), increment.begin(), increment.end());
}

void DirectSumHistory::history(double t_target, std::span<double> out) {
  require_width(width_, out.size(), "DirectSumHistory::history");
  if (!(t_target > nodes_.back())) throw std::invalid_argument("DirectSumHistory::history: target must follow the last node");
  std::fill(out.begin(), out.end(), 0.0);
  const std::size_t n = steps();
  weights_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    weights_[k] = l1_interval_weight(t_target - nodes_[k + 1], nodes_[k + 1] - nodes_[k], alpha_, gamma_2ma_);
  }
  weighted_sum(weights_, increments_.data(), width_, out);
}

struct ToeplitzHistory::Level {
  std::size_t D = 0;
  std::size_t chunk = 1;
  std::vector<std::complex<double>> spectrum;  // scaled by 1 / (2D)
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  std::size_t complex_stride() const { return D + 4; }

  ~Level() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

double ToeplitzHistory::tail_kernel(std::size_t d) const {
  return l1_interval_weight(static_cast<double>(d) * tail_step_, tail_step_, alpha_, gamma_2ma_);
}

ToeplitzHistory::ToeplitzHistory(double alpha, std::size_t width, const TemporalMesh& mesh)
    : alpha_(alpha), gamma_2ma_(std::tgamma(2.0 - alpha)), width_(width), mesh_(mesh) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("history: alpha must lie in (0, 1)");
  if (width == 0) throw std::invalid_argument("history: width must be positive");
  const std::size_t N = mesh_.count();
  tail_start_ = mesh_.uniform_tail_start(1e-10);
  tail_step_ = (mesh_.horizon() - mesh_.node(tail_start_)) / static_cast<double>(N - tail_start_);
  tail_outputs_ = N - tail_start_;
  increments_.reserve(N * width_);

  near_kernel_.resize(kNearBand);
  for (std::size_t d = 1; d < kNearBand; ++d) near_kernel_[d] = tail_kernel(d);

  std::size_t max_real = 0, max_complex = 0;
  for (std::size_t D = kNearBand; D < tail_outputs_; D *= 2) {
    auto level = std::make_unique<Level>();
    level->D = D;
    level->chunk = std::clamp<std::size_t>(kWorkBudget / (2 * D), 1, width_);
    max_real = std::max(max_real, level->chunk * 2 * D);
    max_complex = std::max(max_complex, level->chunk * level->complex_stride());
    ring_rows_ = std::max(ring_rows_, std::min(D, tail_outputs_ - D));
    levels_.push_back(std::move(level));
  }
  ring_rows_ = std::max<std::size_t>(ring_rows_, 1);
  ring_.assign(ring_rows_ * width_, 0.0);
  if (levels_.empty()) return;

  std::lock_guard<std::mutex> lock(planner_mutex());
  work_real_ = fftw_alloc_real(max_real);
  work_complex_ = fftw_alloc_complex(max_complex);
  work_points_ = max_real;
  if (!work_real_ || !work_complex_) throw std::bad_alloc();
  auto* wc = static_cast<fftw_complex*>(work_complex_);
  for (auto& level : levels_) {
    const std::size_t n = 2 * level->D;
    const int ni = static_cast<int>(n);
    level->forward = fftw_plan_dft_r2c_1d(ni, work_real_, wc, FFTW_ESTIMATE);
    level->backward = fftw_plan_dft_c2r_1d(ni, wc, work_real_, FFTW_ESTIMATE);
    if (!level->forward || !level->backward) throw std::runtime_error("ToeplitzHistory: FFT planning failed");
    std::fill(work_real_, work_real_ + n, 0.0);
    for (std::size_t q = 0; q < level->D; ++q) work_real_[q] = tail_kernel(level->D + q) / static_cast<double>(n);
    fftw_execute_dft_r2c(level->forward, work_real_, wc);
    level->spectrum.resize(level->D + 1);
    for (std::size_t q = 0; q <= level->D; ++q) level->spectrum[q] = {wc[q][0], wc[q][1]};
  }
}

ToeplitzHistory::~ToeplitzHistory() {
  levels_.clear();
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (work_real_) fftw_free(work_real_);
  if (work_complex_) fftw_free(work_complex_);
}

std::size_t ToeplitzHistory::stored_values() const {
  std::size_t s = increments_.capacity() + ring_.size() + near_kernel_.size() + work_points_;
  for (const auto& level : levels_) s += 2 * level->spectrum.size() + level->chunk * 2 * level->complex_stride();
  return s;
}

// Adds to ring rows m0 .. m0+D-1 the band d in [D, 2D):
//   y_{m0+r} += sum_q c(D+q) x_{m0+r-D-q},
// read off a length-2D circular correlation of x_{m0-2D} .. x_{m0-1} at index r + D.
void ToeplitzHistory::run_level(Level& level, std::size_t m0) {
  const std::size_t D = level.D, n = 2 * D, P = width_;
  const std::size_t len = std::min(D, tail_outputs_ - m0);
  const std::size_t cs = level.complex_stride();
  auto* wc = static_cast<fftw_complex*>(work_complex_);
  const double* x = increments_.data() + tail_start_ * P;
  for (std::size_t p0 = 0; p0 < P; p0 += level.chunk) {
    const std::size_t chunk = std::min(level.chunk, P - p0);
    for (std::size_t i = 0; i < n; ++i) {
      const bool present = m0 + i >= n;
      const double* row = present ? x + (m0 + i - n) * P + p0 : nullptr;
      for (std::size_t c = 0; c < chunk; ++c) work_real_[c * n + i] = present ? row[c] : 0.0;
    }
    for (std::size_t c = 0; c < chunk; ++c) {
      double* re = work_real_ + c * n;
      fftw_complex* co = wc + c * cs;
      fftw_execute_dft_r2c(level.forward, re, co);
      for (std::size_t q = 0; q <= D; ++q) {
        const std::complex<double> v = std::complex<double>(co[q][0], co[q][1]) * level.spectrum[q];
        co[q][0] = v.real();
        co[q][1] = v.imag();
      }
      fftw_execute_dft_c2r(level.backward, co, re);
    }
    for (std::size_t r = 0; r < len; ++r) {
      double* slot = ring_.data() + ((m0 + r) % ring_rows_) * P + p0;
      for (std::size_t c = 0; c < chunk; ++c) slot[c] += work_real_[c * n + D + r];
    }
  }
}

void ToeplitzHistory::append(std::span<const double> increment, double t_left, double t_right) {
  require_width(width_, increment.size(), "ToeplitzHistory::append");
  if (steps_ >= mesh_.count()) throw std::logic_error("ToeplitzHistory::append: mesh exhausted");
  const double scale = std::max(1.0, std::abs(t_right));
  if (std::abs(t_left - mesh_.node(steps_)) > 1e-12 * scale || std::abs(t_right - mesh_.node(steps_ + 1)) > 1e-12 * scale) {
    throw std::invalid_argument("ToeplitzHistory::append: interval does not match the mesh");
  }
  if (steps_ >= tail_start_) {
    // The tail output for this step has been consumed; make sure its band
    // contributions were produced even if history() was not called.
    const std::size_t m = steps_ - tail_start_;
    for (auto& level : levels_) {
      if (m >= level->D && m % level->D == 0 && prepared_ != m + 1) run_level(*level, m);
    }
    prepared_ = m + 1;
    std::fill_n(ring_.begin() + static_cast<long>((m % ring_rows_) * width_), width_, 0.0);
  }
  increments_.insert(increments_.end(), increment.begin(), increment.end());
  ++steps_;
}

void ToeplitzHistory::history(double t_target, std::span<double> out) {
  require_width(width_, out.size(), "ToeplitzHistory::history");
  const std::size_t n = steps_;
  if (n >= mesh_.count()) throw std::logic_error("ToeplitzHistory::history: mesh exhausted");
  if (std::abs(t_target - mesh_.node(n + 1)) > 1e-12 * std::max(1.0, std::abs(t_target))) {
    throw std::invalid_argument("ToeplitzHistory::history: target does not match the mesh");
  }
  std::fill(out.begin(), out.end(), 0.0);

  const std::size_t head = std::min(n, tail_start_);
  if (head > 0) {
    std::vector<double> w(head);
    for (std::size_t k = 0; k < head; ++k) {
      w[k] = l1_interval_weight(t_target - mesh_.node(k + 1), mesh_.tau(k + 1), alpha_, gamma_2ma_);
    }
    weighted_sum(w, increments_.data(), width_, out);
  }
  if (n <= tail_start_) return;

  const std::size_t m = n - tail_start_;
  if (prepared_ != m + 1) {
    for (auto& level : levels_) {
      if (m >= level->D && m % level->D == 0) run_level(*level, m);
    }
    prepared_ = m + 1;
  }
  const double* slot = ring_.data() + (m % ring_rows_) * width_;
  for (std::size_t p = 0; p < width_; ++p) out[p] += slot[p];

  const std::size_t near = std::min(kNearBand - 1, m);
  std::vector<double> w(near);
  // Oldest first so weighted_sum walks memory forward.
  for (std::size_t i = 0; i < near; ++i) w[i] = near_kernel_[near - i];
  weighted_sum(w, increments_.data(), width_, out, tail_start_ + m - near);
}

SoeHistoryEngine::SoeHistoryEngine(const SoeApproximation& soe, std::size_t width) : history_(soe, width) {}

void SoeHistoryEngine::append(std::span<const double> increment, double t_left, double t_right) {
  if (t_left != last_ || !(t_right > t_left)) throw std::invalid_argument("SoeHistoryEngine::append: intervals must be contiguous");
  history_.update_history(increment, t_right - t_left);
  last_ = t_right;
  ++steps_;
}

void SoeHistoryEngine::history(double t_target, std::span<double> out) {
  if (!(t_target > last_)) throw std::invalid_argument("SoeHistoryEngine::history: target must follow the last node");
  if (steps_ == 0) {
    if (out.size() != width()) throw std::invalid_argument("SoeHistoryEngine::history: output size does not match width");
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  history_.evaluate(t_target - last_, out);
}

std::unique_ptr<HistoryEngine> make_direct_history(double alpha, std::size_t width, const TemporalMesh* mesh,
                                                   DirectEvaluation choice) {
  if (choice == DirectEvaluation::toeplitz) {
    if (!mesh) throw std::invalid_argument("make_direct_history: the Toeplitz engine needs the mesh in advance");
    return std::make_unique<ToeplitzHistory>(alpha, width, *mesh);
  }
  if (choice == DirectEvaluation::automatic && mesh) {
    const std::size_t tail = mesh->count() - mesh->uniform_tail_start(1e-10);
    if (tail >= 4 * kNearBand) return std::make_unique<ToeplitzHistory>(alpha, width, *mesh);
  }
  auto engine = std::make_unique<DirectSumHistory>(alpha, width);
  if (mesh) engine->reserve(mesh->count());
  return engine;
}

}  // namespace tfac
