#pragma once

#include <span>
#include <vector>

#include "affdim/linalg.hpp"

namespace affdim::detail {

/// Fixed pseudo-random orthonormal d x d frame.  Using one fixed starting
/// frame makes repeated subspace estimates at the same word reproducible and
/// exactly nested across subspace dimensions.
const Matrix& generic_frame(int d);

/// Running product with its compound matrices kept in log-scaled form so that
/// long products neither underflow nor lose the small singular values.
class CompoundProduct {
 public:
  explicit CompoundProduct(int d);
  /// Compounds of one factor, precomputed once per map.
  static std::vector<Matrix> compounds_of(const Matrix& a);

  void right_multiply(const std::vector<Matrix>& factor);
  void left_multiply(const std::vector<Matrix>& factor);
  /// log alpha_1 >= ... >= log alpha_d of the product.
  std::vector<double> log_singular_values() const;

 private:
  void rescale(std::size_t p);
  std::vector<Matrix> compound_;
  std::vector<double> log_scale_;
};

/// When to re-orthonormalize a frame pushed through a product of factors:
/// every `every` steps, and earlier whenever the product of the condition
/// numbers since the last QR would exceed 1e8.  Past that the frame's weakest
/// columns are at risk of drowning in rounding.
class RenormSchedule {
 public:
  RenormSchedule(std::span<const Matrix> factors, std::size_t every);
  /// True if the frame must be orthonormalized before applying `symbol`.
  bool before(std::size_t symbol) const { return since_ > 0 && cond_ + log_cond_[symbol] > kMaxLogCond; }
  /// Records that `symbol` was applied; true when the cadence is due.
  bool after(std::size_t symbol) {
    cond_ += log_cond_[symbol];
    return ++since_ >= every_;
  }
  void reset() {
    cond_ = 0.0;
    since_ = 0;
  }

 private:
  static constexpr double kMaxLogCond = 18.4;
  std::vector<double> log_cond_;
  std::size_t every_;
  double cond_ = 0.0;
  std::size_t since_ = 0;
};

}  // namespace affdim::detail
