#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "affdim/linalg.hpp"
#include "affdim/random.hpp"

namespace affdim {

using Symbol = std::uint16_t;

/// Probability vector (p_1, ..., p_N) of a Bernoulli measure on the shift.
class BernoulliWeights {
 public:
  /// Entries must be finite, nonnegative and sum to 1 within 1e-12.
  explicit BernoulliWeights(std::vector<double> p);
  static BernoulliWeights uniform(std::size_t n);

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& values() const noexcept { return p_; }
  /// All p_i > 0.
  bool strictly_positive() const noexcept { return strictly_positive_; }

  /// Inverse-CDF draw; never returns a zero-weight symbol.
  Symbol draw(Rng& rng) const;

 private:
  std::vector<double> p_;
  std::vector<double> cumulative_;
  bool strictly_positive_ = false;
};

/// Finite word over {0, ..., N-1} (0-based; external formats print 1-based).
struct SymbolWord {
  std::vector<Symbol> symbols;

  std::size_t size() const noexcept { return symbols.size(); }
  bool empty() const noexcept { return symbols.empty(); }
  Symbol operator[](std::size_t k) const { return symbols[k]; }
  /// The shifted word (i_1, i_2, ...).
  SymbolWord shifted(std::size_t by = 1) const;
  SymbolWord prefix(std::size_t n) const;
  friend bool operator==(const SymbolWord&, const SymbolWord&) = default;
};

/// Throws InvalidInput unless every symbol is below `alphabet`.
void require_symbols(const SymbolWord& w, std::size_t alphabet);

SymbolWord sample_word(const BernoulliWeights& w, std::size_t n, Rng& rng);

/// Left-to-right product A_{i_0} A_{i_1} ... A_{i_{n-1}}; identity for the
/// empty word.
Matrix word_product(std::span<const Matrix> maps, const SymbolWord& w);

/// Throws InvalidInput unless all maps are square, of one dimension, and
/// contractive invertible.
int require_contractive_tuple(std::span<const Matrix> maps, const LinalgTolerances& tol = {});

/// -sum_i p_i log p_i over p_i > 0, in nats.
double entropy(const BernoulliWeights& w);

/// -sum_k p_k log|det A_k|; equals chi_1 + ... + chi_d.
double expected_log_det_rate(std::span<const Matrix> maps, const BernoulliWeights& w);

struct LyapunovOptions {
  std::size_t steps = 10000;
  std::size_t trials = 20;
  std::size_t renormalize_every = 10;
  /// Exponents closer than gap_fraction * mean(chi) share a block.
  double gap_fraction = 0.05;
};

/// Estimated exponents 0 < chi_1 <= ... <= chi_d (nats per symbol).
struct LyapunovSpectrum {
  std::vector<double> chi;
  /// Per-exponent standard errors across trials; absent for a single trial.
  std::optional<std::vector<double>> standard_error;
  /// chi_1 + ... + chi_p for p = 1..d, from the p-th exterior power growth.
  std::vector<double> partial_sums;
  std::optional<std::vector<double>> partial_sum_error;
  /// Block sizes d_1, ..., d_p.
  std::vector<int> multiplicities;
  double gap_threshold = 0.0;
  /// trial_partial_sums[t][p-1] = estimate of chi_1 + ... + chi_p in trial t.
  std::vector<std::vector<double>> trial_partial_sums;
  std::size_t steps = 0;
  std::size_t trials = 0;

  int dim() const noexcept { return static_cast<int>(chi.size()); }
  bool simple() const noexcept { return multiplicities.size() == chi.size(); }
  double total() const { return partial_sums.back(); }
  /// Standard error of the total from the trial spread (absent for one trial).
  std::optional<double> total_error() const;
};

/// Sum of the exponents against -sum p_k log|det A_k|.
struct ConservationCheck {
  double residual = 0.0;
  /// Trial standard error combined with a floating-point rounding floor;
  /// absent for a single trial.
  std::optional<double> combined_error;
  /// |residual| <= 3 * combined_error.
  std::optional<bool> holds;
};

ConservationCheck conservation_check(const LyapunovSpectrum& s, std::span<const Matrix> maps,
                                     const BernoulliWeights& w);

/// Groups ascending exponents into blocks separated by at least `threshold`.
std::vector<int> detect_multiplicities(std::span<const double> chi, double threshold);

/// Exponents of the Bernoulli cocycle by frame propagation with periodic QR
/// re-orthonormalisation; the raw product is never formed.
LyapunovSpectrum lyapunov_spectrum(std::span<const Matrix> maps, const BernoulliWeights& w,
                                   const LyapunovOptions& options, const Rng& rng);

struct OseledetsOptions {
  /// Target accuracy (principal-angle sine) of the returned subspaces.  The
  /// observed singular-value ratio at each block boundary must be below
  /// angle_tolerance / 10.
  double angle_tolerance = 1e-8;
  std::size_t renormalize_every = 10;
};

/// Estimates E^1 subset ... subset E^{p-1} at the word (i_0, i_1, ...) from
/// the slowest-growing directions of A_{i_depth}^{-1} ... A_{i_0}^{-1}.  The
/// returned chain lists the largest subspace first.  `multiplicities` gives
/// the block sizes; when empty a full flag is requested.  Throws Inconclusive
/// (carrying the smallest observed log-gap) when the gap is too small.
FlagChain oseledets_fast_flag(std::span<const Matrix> maps, const SymbolWord& word, std::size_t depth,
                              std::span<const int> multiplicities = {},
                              const OseledetsOptions& options = {});

struct FlagSample {
  FlagChain flag;
  /// Symbols (j_1, ..., j_n) applied as A_{j_1}^{-1} ... A_{j_n}^{-1}.
  SymbolWord word_prefix;
};

struct FurstenbergOptions {
  std::size_t iterations = 100;
  std::size_t count = 1000;
  std::size_t renormalize_every = 10;
};

/// Draws flags V_{p-1} subset ... subset V_1 approximately distributed by the
/// Furstenberg measure: a Haar-random initial flag is carried to time zero by
/// the inverse matrices along an independent random past of length
/// `iterations`.  The flag lists V_1 (dimension d - d_1) first.  Throws
/// Inconclusive if the spectrum has a single block.
std::vector<FlagSample> furstenberg_sample(std::span<const Matrix> maps, const BernoulliWeights& w,
                                           std::span<const int> multiplicities,
                                           const FurstenbergOptions& options, const Rng& rng);

/// One more step of the skew product: V -> A_i^{-1} V with i drawn from w,
/// independently per sample.
std::vector<FlagSample> furstenberg_step(std::span<const Matrix> maps, const BernoulliWeights& w,
                                         std::span<const FlagSample> samples, const Rng& rng);

/// Scalar summary of a flag used by the stationarity test: the angle of V_1 in
/// [0, pi) when d = 2, otherwise the distance of V_1 from a fixed reference
/// subspace.
double flag_statistic(const FlagChain& flag);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b);

/// KS distance between the flag statistics of `samples` and of their image
/// under one more skew-product step.
double furstenberg_stationarity_ks(std::span<const Matrix> maps, const BernoulliWeights& w,
                                   std::span<const FlagSample> samples, const Rng& rng);

}  // namespace affdim
