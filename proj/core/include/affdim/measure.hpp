#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "affdim/cocycle.hpp"
#include "affdim/linalg.hpp"
#include "affdim/random.hpp"

namespace affdim {

/// f(x) = linear * x + translation.
struct AffineMap {
  Matrix linear;
  Vector translation;

  Vector operator()(const Vector& x) const { return linear * x + translation; }
};

/// Contractive invertible affine maps with Bernoulli weights.
class IfsSystem {
 public:
  IfsSystem(std::vector<AffineMap> maps, BernoulliWeights weights);

  int dim() const noexcept { return d_; }
  std::size_t size() const noexcept { return maps_.size(); }
  const std::vector<AffineMap>& maps() const noexcept { return maps_; }
  const AffineMap& operator[](std::size_t i) const { return maps_[i]; }
  const BernoulliWeights& weights() const noexcept { return weights_; }
  /// The matrix tuple (A_1, ..., A_N).
  const std::vector<Matrix>& linear_parts() const noexcept { return linear_; }
  /// max_i alpha_1(A_i).
  double max_contraction() const noexcept { return max_alpha1_; }
  /// R = max ||t_i|| / (1 - max alpha_1): the attractor lies in B(0, R).
  double bounding_radius() const noexcept { return radius_; }

 private:
  std::vector<AffineMap> maps_;
  std::vector<Matrix> linear_;
  BernoulliWeights weights_;
  int d_ = 0;
  double max_alpha1_ = 0.0;
  double radius_ = 0.0;
};

struct ProjectedPoint {
  Vector point;
  /// Distance to pi of any infinite word extending the input word is at most this.
  double error_bound = 0.0;
};

/// f_{i_0} o ... o f_{i_{n-1}}(0), accumulated Horner-style from the end.
ProjectedPoint natural_projection(const IfsSystem& ifs, const SymbolWord& word);

/// Samples of the self-affine measure with the words that generated them.
struct PointCloud {
  /// dim x size, one point per column.
  Matrix points;
  std::vector<SymbolWord> words;
  std::uint64_t seed = 0;
  std::size_t depth = 0;
  /// Per-point truncation bound; empty when unknown (clouds read from CSV).
  std::vector<double> error_bounds;

  int dim() const noexcept { return static_cast<int>(points.rows()); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(points.cols()); }
};

/// Smallest n with R * (max alpha_1)^n < resolution / 10 and, when the
/// entropy h is positive, e^{h n} >= 100 * samples so that truncated words
/// do not collapse the cloud onto too few atoms.
std::size_t default_depth(const IfsSystem& ifs, double resolution, std::size_t samples = 0);

/// `count` i.i.d. samples pi(w) with w truncated at `depth`.  Deterministic
/// given the seed of `rng` regardless of the worker count.
PointCloud sample_measure(const IfsSystem& ifs, std::size_t count, std::size_t depth, const Rng& rng);

/// Closed axis-aligned box.
struct Box {
  Vector lower;
  Vector upper;

  bool contains(const Eigen::Ref<const Vector>& x) const;
};

struct BoxCheck {
  Box box;
  /// mu(B) and sum_i p_i mu(f_i^{-1} B) from the cloud.
  double lhs = 0.0;
  double rhs = 0.0;
  double discrepancy = 0.0;
  double tolerance = 0.0;
  bool skipped = false;
  bool pass = false;
};

struct SelfAffinityReport {
  std::vector<BoxCheck> boxes;
  double max_discrepancy = 0.0;
  std::size_t skipped = 0;
  bool all_pass = true;
};

/// Compares both sides of mu = sum_i p_i mu o f_i^{-1} on each box.  The
/// tolerance is three standard errors of the per-point difference (and never
/// below 3 sqrt(mu(B)/m)).  Boxes holding between 1 and min_count - 1 samples
/// are skipped.
SelfAffinityReport self_affinity_check(const PointCloud& cloud, const IfsSystem& ifs, std::span<const Box> boxes,
                                       std::size_t min_count = 20);

enum class SeparationStatus { ssc_verified, overlap_detected, inconclusive };

std::string to_string(SeparationStatus s);

struct SeparationWitness {
  SymbolWord first;
  SymbolWord second;
  /// Euclidean distance between the two cylinder hulls (0 when they meet).
  double distance = 0.0;
};

struct SeparationVerdict {
  SeparationStatus status = SeparationStatus::inconclusive;
  std::optional<SeparationWitness> witness;
  /// Smallest hull distance between cylinders with different first symbols
  /// (ssc-verified only).
  double gap = 0.0;
  std::size_t level = 0;
  std::size_t pairs_examined = 0;
  std::string detail;
  /// Strong open set condition certified with U = interior of the attractor
  /// box (independent of the SSC status; SSC implies it is irrelevant).
  bool sosc_verified = false;
  std::string sosc_detail;
};

struct SeparationOptions {
  /// Maximum number of cylinder pairs examined.
  std::size_t pair_budget = 1'000'000;
  /// Two cylinder maps closer than this (relative) coincide.
  double coincidence = 1e-10;
  /// Required hull gap, relative to the diameter of the enclosing box.
  double slack = 1e-9;
};

/// Axis-aligned box containing the attractor: the fixed point of
/// K -> bbox(f_1 K u ... u f_N K) intersected with K, started from B(0, R).
Box attractor_box(const IfsSystem& ifs);

/// Sufficient check of the strong open set condition with U the interior of
/// attractor_box: every hull bbox(f_i K) lies in K, the hulls have pairwise
/// disjoint interiors, and some attractor point (a fixed point or its image
/// under one map) lies in the interior of K.
bool sosc_certificate(const IfsSystem& ifs, std::string* detail = nullptr);

/// Sufficient check of the strong separation condition.  Cylinder hulls
/// f_w(K) for pairs with different first symbols are refined up to `level`
/// while they overlap.  ssc-verified when every pair separates; overlap-
/// detected when two cylinder maps with different first symbols coincide;
/// inconclusive otherwise (e.g. touching cylinders).  The SOSC certificate
/// is attached to every verdict.
SeparationVerdict check_separation(const IfsSystem& ifs, std::size_t level, const SeparationOptions& options = {});

struct LiftResult {
  IfsSystem system;
  double rho = 0.0;
  std::vector<double> tau;
};

/// Lift to R^{d+1}: A_i -> blockdiag(A_i, rho), t_i -> (t_i, (i-1)/N).  The
/// default rho is 0.9 min{1/N, min_i alpha_d(A_i)}; a supplied rho must lie
/// strictly inside that bound.
LiftResult lift_ifs(const IfsSystem& ifs, std::optional<double> rho = std::nullopt);

/// Coordinates frame(V)^T x of every point; words and depth are kept.
PointCloud project_cloud(const PointCloud& cloud, const SubspaceFrame& v);

struct LocalDimensionOptions {
  std::size_t centers = 200;
  std::size_t radii = 24;
  double ratio = 0.8;
  /// Largest radius; defaults to one tenth of the cloud diameter.
  std::optional<double> r_max;
  std::size_t min_usable_radii = 20;
};

struct LocalDimensionResult {
  /// One slope per retained center.
  std::vector<double> slopes;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  std::size_t skipped_centers = 0;
  std::vector<double> radii;

  double iqr() const noexcept { return q3 - q1; }
};

/// Per-center least-squares slope of log mu(B(x, r)) against log r over a
/// geometric radius grid; the center itself is not counted.  Radii with empty
/// balls are dropped and centers with too few usable radii skipped.  Throws
/// Inconclusive if no center survives.
LocalDimensionResult local_dimension_estimate(const PointCloud& cloud, const LocalDimensionOptions& options,
                                              const Rng& rng);

struct BoxCountResult {
  double dimension = 0.0;
  /// Dyadic levels k used (box side = span * 2^-k) and the entropies there.
  std::vector<int> levels;
  std::vector<double> entropies;
};

/// Information dimension from aligned dyadic boxes: slope of the box entropy
/// against k log 2 over levels k >= 2 while the number of occupied boxes stays
/// below size / min_occupancy.
BoxCountResult box_counting_dimension(const PointCloud& cloud, double min_occupancy = 50.0);

/// CSV with header x1,...,xd,word,depth; words are dot-separated 1-based
/// symbols.  Values are written in shortest round-trip form.
void write_cloud_csv(std::ostream& out, const PointCloud& cloud);
PointCloud read_cloud_csv(std::istream& in);

}  // namespace affdim
