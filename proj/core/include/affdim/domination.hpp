#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "affdim/cocycle.hpp"
#include "affdim/linalg.hpp"
#include "affdim/random.hpp"

namespace affdim {

/// log(alpha_{i+1}(A_w) / alpha_i(A_w)) extremes over words of each length.
struct GapRatioTable {
  int d = 0;
  std::size_t n_max = 0;
  /// max_log_ratio[n][i-1] = max over |w| = n of log(alpha_{i+1}/alpha_i).
  std::vector<std::vector<double>> max_log_ratio;
  std::vector<std::vector<double>> min_log_ratio;
  /// Words examined per length.
  std::vector<std::size_t> words;
  /// False when the maxima come from random words (lower bounds only).
  bool exhaustive = true;
};

struct ScanOptions {
  /// Maximum number of products (tree nodes) an exhaustive scan may form.
  std::size_t budget = 1'000'000;
};

/// Number of products an exhaustive scan to n_max forms: sum_{n<=n_max} N^n.
std::size_t scan_cost(std::size_t alphabet, std::size_t n_max);

/// Exact extremes over all words up to n_max, enumerated depth first with the
/// compound matrices of each prefix reused by its children.  Singular-value
/// ratios come from compound norms in log space.  Throws BudgetExceeded when
/// the tree is larger than options.budget; gap_ratio_scan_sampled is the
/// Monte-Carlo fallback.
GapRatioTable gap_ratio_scan(std::span<const Matrix> maps, std::size_t n_max, const ScanOptions& options = {});

/// Extremes over `words_per_length` random uniform words per length (lower
/// bounds on the true maxima).
GapRatioTable gap_ratio_scan_sampled(std::span<const Matrix> maps, std::size_t n_max,
                                     std::size_t words_per_length, const Rng& rng);

/// log alpha_i(P) for i = 1..d (descending) from compound norms.
std::vector<double> log_singular_values_via_compounds(const Matrix& p);

enum class DominationStatus { dominated, non_dominated, inconclusive };

std::string to_string(DominationStatus s);

struct IndexDomination {
  int index = 0;  // i in 1..d-1
  DominationStatus status = DominationStatus::inconclusive;
  /// Least-squares slope of log(max ratio) against n over n >= 1.
  double decay_rate = 0.0;
  /// Smallest C with max ratio(n) <= C exp(decay_rate * n) for all scanned n.
  double constant_estimate = 1.0;
  /// exp of the least-squares intercept.
  double fitted_intercept = 1.0;
  double head_slope = 0.0;
  double tail_slope = 0.0;
  double rms_residual = 0.0;
  std::size_t n_max = 0;
};

struct DominationReport {
  int d = 0;
  std::vector<IndexDomination> indices;
  /// D(A): the dominated indices, ascending.
  std::vector<int> dominated_indices;
  double slope_epsilon = 0.01;
  bool exhaustive = true;

  /// Every index decided one way or the other.
  bool totally_dominated_splitting() const;
  bool is_dominated(int i) const;
};

/// Decides each index from the scan table:
///  - dominated: overall, head and tail slopes all < -eps and the tail slope
///    within a factor two of the head slope (rules out polynomial decay);
///  - non-dominated: tail slope >= -eps (max ratio bounded below by
///    C^{-1} e^{-eps n});
///  - inconclusive otherwise.
/// Requires n_max >= 6.
DominationReport detect_domination(const GapRatioTable& table, double slope_epsilon = 0.01);

struct StpReport {
  /// Every minor of order p <= d-1 exceeds the threshold.
  bool strictly_totally_positive = false;
  /// det > threshold, reported separately.
  bool determinant_positive = false;
  double smallest_minor = 0.0;
  int smallest_minor_order = 0;
};

StpReport stp_details(const Matrix& a, double minor_epsilon = 1e-12);
bool stp_check(const Matrix& a, double minor_epsilon = 1e-12);

/// Every entry of every A_i^[p] exceeds minor_epsilon, i.e. the closed
/// positive cone of the p-th exterior power is mapped into its interior.
bool cone_invariance_check(std::span<const Matrix> maps, int p, double minor_epsilon = 1e-12);

struct BundleOptions {
  /// Singular-value ratio required at the splitting position of the product.
  double gap_tolerance = 1e-6;
  double equivariance_tolerance = 1e-4;
  std::size_t renormalize_every = 10;
};

struct BundleEstimate {
  int index = 0;
  /// Strong stable bundle F^i (dimension d - i), from the future word.
  SubspaceFrame F;
  /// Dominating bundle E^i (dimension i), from the past word.
  SubspaceFrame E;
  /// Sine of the smallest angle between F and E.
  double angle_lower_bound = 0.0;
  /// growth_ratios[n-1] = ||A^(n)|F|| / alpha_{i+1}(A^(n)), A^(n) = A_{i_{n-1}}...A_{i_0},
  /// for n = 1..min(depth, |future| - depth).
  std::vector<double> growth_ratios;
  double growth_constant = 0.0;
  double equivariance_residual_F = 0.0;
  double equivariance_residual_E = 0.0;
  bool equivariance_ok = false;
  /// Distance between the depth-n and depth-2n estimates of F, when the
  /// future word is long enough.
  std::optional<double> cauchy_residual;
  /// Observed log(alpha_i / alpha_{i+1}) of the depth-n products (F side, E side).
  double observed_log_gap_F = 0.0;
  double observed_log_gap_E = 0.0;
  SymbolWord future;
  SymbolWord past;
};

/// Estimates F^i at the two-sided word (..., i_{-2}, i_{-1} | i_0, i_1, ...).
/// `future` = (i_0, i_1, ...) must have at least depth + 1 symbols; `past` =
/// (i_{-1}, i_{-2}, ...) at least depth symbols.  F is the span of the d - i
/// right singular vectors of A_{i_{n-1}}...A_{i_0} with smallest singular
/// values; E the span of the i left singular vectors of
/// A_{i_{-1}}...A_{i_{-n}} with largest singular values.  Throws Refused if
/// i is not dominated in `report`, Inconclusive if the depth is too small.
BundleEstimate strong_stable_bundle(std::span<const Matrix> maps, const SymbolWord& future,
                                    const SymbolWord& past, int i, std::size_t depth,
                                    const DominationReport& report, const BundleOptions& options = {});

struct SplittingResult {
  /// e^{i_1}, ..., e^{i_{k+1}}.
  std::vector<SubspaceFrame> spaces;
  double min_pairwise_angle_sine = 0.0;
  /// Smallest singular value of the concatenated frames (direct-sum check).
  double direct_sum_sigma_min = 0.0;
};

/// e^{i_1} = E^{i_1}, e^{i_j} = E^{i_j} cap F^{i_{j-1}}, e^{i_{k+1}} = F^{i_k}.
/// Bundles must be estimated at one word and sorted by index.  Throws
/// InconsistentEstimate if an intersection has the wrong dimension.
SplittingResult splitting_subspaces(std::span<const BundleEstimate> bundles,
                                    double intersection_tol = LinalgTolerances{}.intersection);

}  // namespace affdim
