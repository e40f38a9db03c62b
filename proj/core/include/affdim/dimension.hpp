#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "affdim/cocycle.hpp"
#include "affdim/domination.hpp"
#include "affdim/measure.hpp"

namespace affdim {

/// Where a reported number came from.
enum class Provenance { estimated, closed_form, user_supplied };

std::string to_string(Provenance p);

struct DimensionInputs {
  double h = 0.0;
  double H = 0.0;
  /// Ascending exponents chi_1 <= ... <= chi_d.
  std::vector<double> chi;
  /// i -> dim of the projection of mu onto the i-dimensional V_i-perp.
  std::map<int, double> proj_dims;
  /// Index set of the sum.
  std::vector<int> D;
};

/// (h - H)/chi_d + sum_{i in D} ((chi_{i+1} - chi_i)/chi_d) proj_dims(i).
/// Throws InvalidInput on a missing projection dimension or a malformed
/// spectrum.
double ly_dimension(const DimensionInputs& in);

struct LyapunovDimension {
  /// Clamped to [0, d].
  double value = 0.0;
  double raw = 0.0;
  bool clamped = false;
  /// Minimising k (1-based).
  int k = 1;
};

/// min over k of k - 1 + (h - chi_1 - ... - chi_{k-1}) / chi_k.
LyapunovDimension lyapunov_dimension(double h, std::span<const double> chi);

struct CarpetDigit {
  int column = 0;
  int row = 0;
};

struct BedfordMcMullen {
  double value = 0.0;
  double h = 0.0;
  double row_entropy = 0.0;
  /// log n and log m.
  double chi_1 = 0.0;
  double chi_2 = 0.0;
  /// row_entropy / log n.
  double proj_dim = 0.0;
};

/// H(p)/log m + (1/log n - 1/log m) H(row marginal) for the carpet with maps
/// diag(1/m, 1/n) x + (column/m, row/n).
BedfordMcMullen bedford_mcmullen_closed_form(std::span<const CarpetDigit> digits, std::span<const double> probs,
                                             int m, int n);

IfsSystem bedford_mcmullen_ifs(std::span<const CarpetDigit> digits, std::span<const double> probs, int m, int n);

enum class Equivalence { holds, fails, inconclusive };

std::string to_string(Equivalence e);

struct EquivalenceCheck {
  Equivalence result = Equivalence::inconclusive;
  /// |ly_dim - lyapunov_dim| <= tol.
  bool dimensions_equal = false;
  /// H <= tol and |proj_dims(i) - min(i, ly_dim)| <= tol for all i in D.
  bool conditions_hold = false;
  double dimension_residual = 0.0;
  double H_residual = 0.0;
  std::map<int, double> projection_residuals;
};

/// Evaluates both sides of the equivalence "dimension equals the Lyapunov
/// dimension iff H = 0 and every projection is as large as possible".  The
/// result is holds/fails when the two sides agree and inconclusive when they
/// disagree (which points at an inconsistent input or estimate).
EquivalenceCheck kaplan_yorke_equivalence_check(double ly_dim, double lyapunov_dim, double H,
                                                const std::map<int, double>& proj_dims, std::span<const int> D,
                                                double tol);

struct TelescopingResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// Both sides of
///   (H^0 - H^d)/chi_d + sum_{i<d} ((chi_{i+1} - chi_i)/chi_d) sum_{k<i} (H^k - H^{k+1})/chi_{k+1}
///     = sum_{j<d} (H^j - H^{j+1})/chi_{j+1}
/// with agreement required to 1e-12 relative to the size of the terms.
TelescopingResult telescoping_identity(std::span<const double> hseq, std::span<const double> chi);
bool telescoping_identity_check(std::span<const double> hseq, std::span<const double> chi);

struct PipelineConfig {
  std::uint64_t seed = 1;
  LyapunovOptions lyapunov{};
  std::size_t samples = 200'000;
  /// Truncation depth; defaults to default_depth at the smallest radius.
  std::optional<std::size_t> depth;
  LocalDimensionOptions local{};
  /// Flag (or bundle) samples whose projections are measured.
  std::size_t projection_samples = 5;
  std::size_t furstenberg_iterations = 100;
  std::size_t scan_length = 12;
  ScanOptions scan{};
  std::size_t sampled_scan_words = 2000;
  double slope_epsilon = 0.01;
  std::size_t bundle_depth = 40;
  std::size_t separation_level = 8;
  SeparationOptions separation{};
  /// User-supplied fiber-entropy correction.
  std::optional<double> H;
  double equivalence_tolerance = 0.01;
  /// Keep the sampled cloud in the report.
  bool keep_cloud = false;
};

struct ProjectionEstimate {
  int index = 0;
  /// Median over the projection samples of the per-sample median slope.
  double value = 0.0;
  /// value after clamping to [0, index] and enforcing monotonicity in i.
  double used = 0.0;
  std::vector<double> sample_medians;
  std::vector<double> sample_iqrs;
  /// Per-center slopes of each projection sample.
  std::vector<std::vector<double>> sample_slopes;
};

struct DimensionReport {
  int d = 0;
  double h = 0.0;
  std::optional<double> H;
  Provenance H_provenance = Provenance::estimated;
  LyapunovSpectrum spectrum;
  /// "simple-spectrum", "tds" or "formula-not-applicable".
  std::string routing;
  std::vector<int> D;
  std::optional<DominationReport> domination;
  SeparationVerdict separation;
  std::map<int, ProjectionEstimate> projections;
  std::optional<double> ly_dim;
  /// The formula's value if H were 0; set when H is unknown.
  std::optional<double> ly_dim_if_H_zero;
  LyapunovDimension lyapunov_dim;
  LocalDimensionResult empirical;
  std::optional<BoxCountResult> box_count;
  std::optional<EquivalenceCheck> equivalence;
  std::size_t samples = 0;
  std::size_t depth = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> caveats;
  std::optional<PointCloud> cloud;
};

/// Spectrum, routing (simple spectrum or domination), projection directions,
/// sampled measure, projected local dimensions, both dimension formulas and
/// the equivalence check.  H is 0 only when separation is verified and all
/// weights are positive; otherwise config.H is used, and without it the
/// formula value is reported as conditional.
DimensionReport full_pipeline(const IfsSystem& ifs, const PipelineConfig& config);

}  // namespace affdim
