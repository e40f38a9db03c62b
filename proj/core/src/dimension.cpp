#include "affdim/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "affdim/errors.hpp"

namespace affdim {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::estimated: return "estimated";
    case Provenance::closed_form: return "closed-form";
    case Provenance::user_supplied: return "user-supplied";
  }
  return "estimated";
}

std::string to_string(Equivalence e) {
  switch (e) {
    case Equivalence::holds: return "holds";
    case Equivalence::fails: return "fails";
    case Equivalence::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

void require_spectrum(std::span<const double> chi) {
  if (chi.empty()) throw InvalidInput("empty Lyapunov spectrum");
  for (std::size_t j = 0; j < chi.size(); ++j) {
    if (!std::isfinite(chi[j]) || chi[j] <= 0.0) throw InvalidInput("Lyapunov exponents must be finite and positive");
    if (j > 0 && chi[j] < chi[j - 1]) throw InvalidInput("Lyapunov exponents must be ascending");
  }
}

}  // namespace

double ly_dimension(const DimensionInputs& in) {
  require_spectrum(in.chi);
  const int d = static_cast<int>(in.chi.size());
  if (!std::isfinite(in.h) || in.h < 0.0) throw InvalidInput("entropy must be finite and nonnegative");
  if (!std::isfinite(in.H) || in.H < 0.0) throw InvalidInput("H must be finite and nonnegative");
  const double chi_d = in.chi.back();
  double value = (in.h - in.H) / chi_d;
  for (int i : in.D) {
    if (i < 1 || i > d - 1) throw InvalidInput("index " + std::to_string(i) + " outside 1..d-1");
    const auto it = in.proj_dims.find(i);
    if (it == in.proj_dims.end()) throw InvalidInput("missing projection dimension for index " + std::to_string(i));
    const auto k = static_cast<std::size_t>(i);
    value += ((in.chi[k] - in.chi[k - 1]) / chi_d) * it->second;
  }
  return value;
}

LyapunovDimension lyapunov_dimension(double h, std::span<const double> chi) {
  require_spectrum(chi);
  if (!std::isfinite(h) || h < 0.0) throw InvalidInput("entropy must be finite and nonnegative");
  const int d = static_cast<int>(chi.size());
  std::vector<double> before(static_cast<std::size_t>(d) + 1, 0.0);  // chi_1 + ... + chi_{k-1}
  for (int k = 1; k <= d; ++k) before[static_cast<std::size_t>(k)] = before[static_cast<std::size_t>(k - 1)] + chi[static_cast<std::size_t>(k - 1)];
  const auto value_at = [&](int k) {
    return (k - 1) + (h - before[static_cast<std::size_t>(k - 1)]) / chi[static_cast<std::size_t>(k - 1)];
  };
  // k -> value_at(k) decreases while h >= chi_1 + ... + chi_k and increases
  // afterwards, so the minimum sits at the first k with h below that sum.
  int k_star = d;
  for (int k = 1; k <= d; ++k) {
    if (h < before[static_cast<std::size_t>(k)]) {
      k_star = k;
      break;
    }
  }
  LyapunovDimension out;
  out.k = k_star;
  out.raw = value_at(k_star);
  for (int k : {k_star - 1, k_star + 1}) {
    if (k >= 1 && k <= d && value_at(k) < out.raw) {
      out.raw = value_at(k);
      out.k = k;
    }
  }
  out.value = std::clamp(out.raw, 0.0, static_cast<double>(d));
  out.clamped = out.value != out.raw;
  return out;
}

namespace {

void validate_carpet(std::span<const CarpetDigit> digits, std::span<const double> probs, int m, int n) {
  if (!(n >= 2 && m > n)) throw InvalidInput("carpet needs integers m > n >= 2");
  if (digits.empty()) throw InvalidInput("carpet needs at least one digit");
  if (probs.size() != digits.size()) throw InvalidInput("one probability per digit required");
  std::set<std::pair<int, int>> seen;
  for (const auto& g : digits) {
    if (g.column < 0 || g.column >= m || g.row < 0 || g.row >= n) {
      throw InvalidInput("digit (" + std::to_string(g.column) + "," + std::to_string(g.row) + ") outside the grid");
    }
    if (!seen.insert({g.column, g.row}).second) throw InvalidInput("repeated carpet digit");
  }
}

}  // namespace

BedfordMcMullen bedford_mcmullen_closed_form(std::span<const CarpetDigit> digits, std::span<const double> probs,
                                             int m, int n) {
  validate_carpet(digits, probs, m, n);
  const BernoulliWeights w(std::vector<double>(probs.begin(), probs.end()));
  std::vector<double> rows(static_cast<std::size_t>(n), 0.0);
  for (std::size_t k = 0; k < digits.size(); ++k) rows[static_cast<std::size_t>(digits[k].row)] += probs[k];
  BedfordMcMullen out;
  out.h = entropy(w);
  for (double q : rows) {
    if (q > 0.0) out.row_entropy -= q * std::log(q);
  }
  out.chi_1 = std::log(static_cast<double>(n));
  out.chi_2 = std::log(static_cast<double>(m));
  out.proj_dim = out.row_entropy / out.chi_1;
  out.value = out.h / out.chi_2 + (1.0 / out.chi_1 - 1.0 / out.chi_2) * out.row_entropy;
  return out;
}

IfsSystem bedford_mcmullen_ifs(std::span<const CarpetDigit> digits, std::span<const double> probs, int m, int n) {
  validate_carpet(digits, probs, m, n);
  std::vector<AffineMap> maps;
  for (const auto& g : digits) {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 1.0 / m;
    a(1, 1) = 1.0 / n;
    Vector t(2);
    t << static_cast<double>(g.column) / m, static_cast<double>(g.row) / n;
    maps.push_back({a, t});
  }
  return IfsSystem(std::move(maps), BernoulliWeights(std::vector<double>(probs.begin(), probs.end())));
}

EquivalenceCheck kaplan_yorke_equivalence_check(double ly_dim, double lyapunov_dim, double H,
                                                const std::map<int, double>& proj_dims, std::span<const int> D,
                                                double tol) {
  EquivalenceCheck out;
  out.dimension_residual = std::abs(ly_dim - lyapunov_dim);
  out.dimensions_equal = out.dimension_residual <= tol;
  out.H_residual = std::max(0.0, H);
  bool conditions = out.H_residual <= tol;
  for (int i : D) {
    const auto it = proj_dims.find(i);
    if (it == proj_dims.end()) throw InvalidInput("missing projection dimension for index " + std::to_string(i));
    const double r = std::abs(it->second - std::min(static_cast<double>(i), ly_dim));
    out.projection_residuals[i] = r;
    conditions = conditions && r <= tol;
  }
  out.conditions_hold = conditions;
  if (out.dimensions_equal == out.conditions_hold) {
    out.result = out.dimensions_equal ? Equivalence::holds : Equivalence::fails;
  } else {
    out.result = Equivalence::inconclusive;
  }
  return out;
}

TelescopingResult telescoping_identity(std::span<const double> hseq, std::span<const double> chi) {
  require_spectrum(chi);
  const std::size_t d = chi.size();
  if (hseq.size() != d + 1) throw InvalidInput("H sequence must have d + 1 entries");
  for (std::size_t j = 0; j + 1 < hseq.size(); ++j) {
    if (!(hseq[j] >= hseq[j + 1])) throw InvalidInput("H sequence must be nonincreasing");
  }
  const double chi_d = chi[d - 1];
  double scale = 1.0;
  TelescopingResult out;
  out.lhs = (hseq[0] - hseq[d]) / chi_d;
  scale = std::max(scale, std::abs(out.lhs));
  for (std::size_t i = 1; i < d; ++i) {
    double inner = 0.0;
    for (std::size_t k = 0; k < i; ++k) inner += (hseq[k] - hseq[k + 1]) / chi[k];
    const double term = ((chi[i] - chi[i - 1]) / chi_d) * inner;
    out.lhs += term;
    scale += std::abs(term);
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double term = (hseq[j] - hseq[j + 1]) / chi[j];
    out.rhs += term;
    scale += std::abs(term);
  }
  out.holds = std::abs(out.lhs - out.rhs) <= 1e-12 * scale;
  return out;
}

bool telescoping_identity_check(std::span<const double> hseq, std::span<const double> chi) {
  return telescoping_identity(hseq, chi).holds;
}

}  // namespace affdim
