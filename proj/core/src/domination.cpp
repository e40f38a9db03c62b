#include "affdim/domination.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "affdim/errors.hpp"
#include "affdim/parallel.hpp"
#include "internal.hpp"

namespace affdim {

namespace detail {

const Matrix& generic_frame(int d) {
  static const std::vector<Matrix> frames = [] {
    std::vector<Matrix> out;
    Rng rng(0x6a09e667f3bcc908ULL);
    for (int k = 0; k <= kMaxDimension; ++k) out.push_back(k == 0 ? Matrix() : rng.random_frame(k, k));
    return out;
  }();
  return frames.at(static_cast<std::size_t>(d));
}

RenormSchedule::RenormSchedule(std::span<const Matrix> factors, std::size_t every)
    : every_(std::max<std::size_t>(1, every)) {
  log_cond_.reserve(factors.size());
  for (const auto& a : factors) {
    const Vector sv = singular_values(a);
    log_cond_.push_back(std::log(sv(sv.size() - 1) / sv(0)));  // ascending
  }
}

CompoundProduct::CompoundProduct(int d) {
  for (int p = 1; p <= d; ++p) {
    const auto n = static_cast<Eigen::Index>(index_tuples(d, p).size());
    compound_.push_back(Matrix::Identity(n, n));
    log_scale_.push_back(0.0);
  }
}

std::vector<Matrix> CompoundProduct::compounds_of(const Matrix& a) {
  std::vector<Matrix> out;
  for (int p = 1; p <= a.rows(); ++p) out.push_back(exterior_power(a, p));
  return out;
}

void CompoundProduct::rescale(std::size_t p) {
  const double m = compound_[p].cwiseAbs().maxCoeff();
  if (m > 0.0 && std::isfinite(m)) {
    compound_[p] /= m;
    log_scale_[p] += std::log(m);
  }
}

void CompoundProduct::right_multiply(const std::vector<Matrix>& factor) {
  for (std::size_t p = 0; p < compound_.size(); ++p) {
    compound_[p] = compound_[p] * factor[p];
    rescale(p);
  }
}

void CompoundProduct::left_multiply(const std::vector<Matrix>& factor) {
  for (std::size_t p = 0; p < compound_.size(); ++p) {
    compound_[p] = factor[p] * compound_[p];
    rescale(p);
  }
}

std::vector<double> CompoundProduct::log_singular_values() const {
  std::vector<double> out(compound_.size());
  double previous = 0.0;
  for (std::size_t p = 0; p < compound_.size(); ++p) {
    const double log_norm = std::log(operator_norm(compound_[p])) + log_scale_[p];
    out[p] = log_norm - previous;
    previous = log_norm;
  }
  return out;
}

}  // namespace detail

std::vector<double> log_singular_values_via_compounds(const Matrix& p) {
  require_square_finite(p, "log_singular_values_via_compounds");
  detail::CompoundProduct prod(static_cast<int>(p.rows()));
  prod.right_multiply(detail::CompoundProduct::compounds_of(p));
  return prod.log_singular_values();
}

std::size_t scan_cost(std::size_t alphabet, std::size_t n_max) {
  constexpr std::size_t cap = std::numeric_limits<std::size_t>::max() / 4;
  std::size_t total = 0;
  std::size_t level = 1;
  for (std::size_t n = 0; n <= n_max; ++n) {
    total += level;
    if (total > cap) return cap;
    if (n < n_max) {
      if (level > cap / std::max<std::size_t>(1, alphabet)) return cap;
      level *= alphabet;
    }
  }
  return total;
}

namespace {

GapRatioTable empty_table(int d, std::size_t n_max, bool exhaustive) {
  GapRatioTable t;
  t.d = d;
  t.n_max = n_max;
  t.exhaustive = exhaustive;
  const auto idx = static_cast<std::size_t>(std::max(d - 1, 0));
  t.max_log_ratio.assign(n_max + 1, std::vector<double>(idx, -std::numeric_limits<double>::infinity()));
  t.min_log_ratio.assign(n_max + 1, std::vector<double>(idx, std::numeric_limits<double>::infinity()));
  t.words.assign(n_max + 1, 0);
  return t;
}

void record(GapRatioTable& t, std::size_t n, const std::vector<double>& log_sv) {
  for (std::size_t i = 0; i + 1 < log_sv.size(); ++i) {
    const double r = log_sv[i + 1] - log_sv[i];
    t.max_log_ratio[n][i] = std::max(t.max_log_ratio[n][i], r);
    t.min_log_ratio[n][i] = std::min(t.min_log_ratio[n][i], r);
  }
  ++t.words[n];
}

void merge_into(GapRatioTable& into, const GapRatioTable& from) {
  for (std::size_t n = 0; n <= into.n_max; ++n) {
    for (std::size_t i = 0; i < into.max_log_ratio[n].size(); ++i) {
      into.max_log_ratio[n][i] = std::max(into.max_log_ratio[n][i], from.max_log_ratio[n][i]);
      into.min_log_ratio[n][i] = std::min(into.min_log_ratio[n][i], from.min_log_ratio[n][i]);
    }
    into.words[n] += from.words[n];
  }
}

void visit(GapRatioTable& t, const detail::CompoundProduct& prefix, std::size_t n,
           const std::vector<std::vector<Matrix>>& factors) {
  record(t, n, prefix.log_singular_values());
  if (n == t.n_max) return;
  for (const auto& f : factors) {
    detail::CompoundProduct child = prefix;
    child.right_multiply(f);
    visit(t, child, n + 1, factors);
  }
}

double slope_of(const std::vector<double>& y, std::size_t lo, std::size_t hi, double* intercept = nullptr) {
  // least squares of y[n] against n for n in [lo, hi]
  double sn = 0, sy = 0, snn = 0, sny = 0;
  const auto count = static_cast<double>(hi - lo + 1);
  for (std::size_t n = lo; n <= hi; ++n) {
    const auto x = static_cast<double>(n);
    sn += x;
    sy += y[n];
    snn += x * x;
    sny += x * y[n];
  }
  const double denom = count * snn - sn * sn;
  const double b = (count * sny - sn * sy) / denom;
  if (intercept != nullptr) *intercept = (sy - b * sn) / count;
  return b;
}

}  // namespace

GapRatioTable gap_ratio_scan(std::span<const Matrix> maps, std::size_t n_max, const ScanOptions& options) {
  const int d = require_contractive_tuple(maps);
  const std::size_t cost = scan_cost(maps.size(), n_max);
  if (cost > options.budget) {
    throw BudgetExceeded("exhaustive scan to length " + std::to_string(n_max) + " needs " + std::to_string(cost) +
                         " products (budget " + std::to_string(options.budget) +
                         "); lower n_max or use the Monte-Carlo scan (gap_ratio_scan_sampled)");
  }
  std::vector<std::vector<Matrix>> factors;
  for (const auto& a : maps) factors.push_back(detail::CompoundProduct::compounds_of(a));

  GapRatioTable table = empty_table(d, n_max, true);
  record(table, 0, detail::CompoundProduct(d).log_singular_values());
  if (n_max == 0) return table;

  // one subtree per first symbol; merged in symbol order
  std::vector<GapRatioTable> partial(maps.size(), empty_table(d, n_max, true));
  parallel_for(maps.size(), [&](std::size_t s) {
    detail::CompoundProduct first(d);
    first.right_multiply(factors[s]);
    visit(partial[s], first, 1, factors);
  });
  for (const auto& p : partial) merge_into(table, p);
  return table;
}

GapRatioTable gap_ratio_scan_sampled(std::span<const Matrix> maps, std::size_t n_max,
                                     std::size_t words_per_length, const Rng& rng) {
  const int d = require_contractive_tuple(maps);
  std::vector<std::vector<Matrix>> factors;
  for (const auto& a : maps) factors.push_back(detail::CompoundProduct::compounds_of(a));
  const auto weights = BernoulliWeights::uniform(maps.size());

  GapRatioTable table = empty_table(d, n_max, false);
  record(table, 0, detail::CompoundProduct(d).log_singular_values());
  std::vector<GapRatioTable> partial(words_per_length, empty_table(d, n_max, false));
  parallel_for(words_per_length, [&](std::size_t k) {
    Rng word_rng = rng.derive(k);
    // one random word of length n_max; its prefixes give one sample per length
    detail::CompoundProduct prod(d);
    for (std::size_t n = 1; n <= n_max; ++n) {
      prod.right_multiply(factors[weights.draw(word_rng)]);
      record(partial[k], n, prod.log_singular_values());
    }
  });
  for (const auto& p : partial) merge_into(table, p);
  return table;
}

std::string to_string(DominationStatus s) {
  switch (s) {
    case DominationStatus::dominated: return "dominated";
    case DominationStatus::non_dominated: return "non-dominated";
    case DominationStatus::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

bool DominationReport::totally_dominated_splitting() const {
  return std::none_of(indices.begin(), indices.end(),
                      [](const IndexDomination& x) { return x.status == DominationStatus::inconclusive; });
}

bool DominationReport::is_dominated(int i) const {
  return std::find(dominated_indices.begin(), dominated_indices.end(), i) != dominated_indices.end();
}

DominationReport detect_domination(const GapRatioTable& table, double slope_epsilon) {
  if (table.n_max < 6) throw InvalidInput("detect_domination needs a scan covering n >= 6");
  DominationReport report;
  report.d = table.d;
  report.slope_epsilon = slope_epsilon;
  report.exhaustive = table.exhaustive;
  const std::size_t n_max = table.n_max;
  const std::size_t third = std::max<std::size_t>(2, n_max / 3);
  for (int i = 1; i < table.d; ++i) {
    std::vector<double> y(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) y[n] = table.max_log_ratio[n][static_cast<std::size_t>(i - 1)];
    IndexDomination entry;
    entry.index = i;
    entry.n_max = n_max;
    double intercept = 0.0;
    entry.decay_rate = slope_of(y, 1, n_max, &intercept);
    entry.fitted_intercept = std::exp(intercept);
    entry.head_slope = slope_of(y, 1, third);
    entry.tail_slope = slope_of(y, n_max - third + 1, n_max);
    double log_c = 0.0;
    double ss = 0.0;
    for (std::size_t n = 0; n <= n_max; ++n) {
      log_c = std::max(log_c, y[n] - entry.decay_rate * static_cast<double>(n));
      if (n >= 1) {
        const double r = y[n] - (intercept + entry.decay_rate * static_cast<double>(n));
        ss += r * r;
      }
    }
    entry.constant_estimate = std::exp(log_c);
    entry.rms_residual = std::sqrt(ss / static_cast<double>(n_max));

    const double eps = slope_epsilon;
    const bool decaying = entry.decay_rate < -eps && entry.head_slope < -eps && entry.tail_slope < -eps;
    const double curvature = decaying ? entry.tail_slope / entry.head_slope : 0.0;
    if (decaying && curvature >= 0.5 && curvature <= 2.0) {
      entry.status = DominationStatus::dominated;
      report.dominated_indices.push_back(i);
    } else if (entry.tail_slope >= -eps) {
      entry.status = DominationStatus::non_dominated;
    } else {
      entry.status = DominationStatus::inconclusive;
    }
    report.indices.push_back(entry);
  }
  return report;
}

StpReport stp_details(const Matrix& a, double minor_epsilon) {
  require_square_finite(a, "stp_check");
  const int d = static_cast<int>(a.rows());
  StpReport out;
  out.smallest_minor = std::numeric_limits<double>::infinity();
  for (int p = 1; p <= d - 1; ++p) {
    const Matrix c = exterior_power(a, p);
    const double m = c.minCoeff();
    if (m < out.smallest_minor) {
      out.smallest_minor = m;
      out.smallest_minor_order = p;
    }
  }
  out.strictly_totally_positive = d >= 2 && out.smallest_minor > minor_epsilon;
  out.determinant_positive = a.determinant() > minor_epsilon;
  return out;
}

bool stp_check(const Matrix& a, double minor_epsilon) {
  return stp_details(a, minor_epsilon).strictly_totally_positive;
}

bool cone_invariance_check(std::span<const Matrix> maps, int p, double minor_epsilon) {
  if (maps.empty()) throw InvalidInput("cone_invariance_check: no matrices");
  const int d = static_cast<int>(maps.front().rows());
  if (p < 1 || p > d - 1) throw InvalidInput("cone_invariance_check: p must satisfy 1 <= p <= d-1");
  return std::all_of(maps.begin(), maps.end(),
                     [&](const Matrix& a) { return exterior_power(a, p).minCoeff() > minor_epsilon; });
}

}  // namespace affdim
