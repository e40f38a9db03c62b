#include "affdim/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "affdim/errors.hpp"
#include "affdim/parallel.hpp"
#include "internal.hpp"

namespace affdim {

// ---------------------------------------------------------------- weights

BernoulliWeights::BernoulliWeights(std::vector<double> p) : p_(std::move(p)) {
  if (p_.empty()) throw InvalidInput("weights must be non-empty");
  double sum = 0.0;
  strictly_positive_ = true;
  for (double x : p_) {
    if (!std::isfinite(x) || x < 0.0) throw InvalidInput("weights must be finite and nonnegative");
    if (x == 0.0) strictly_positive_ = false;
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw InvalidInput("weights sum to " + std::to_string(sum) + ", expected 1");
  }
  cumulative_.resize(p_.size());
  std::partial_sum(p_.begin(), p_.end(), cumulative_.begin());
}

BernoulliWeights BernoulliWeights::uniform(std::size_t n) {
  if (n == 0) throw InvalidInput("uniform weights over an empty alphabet");
  return BernoulliWeights(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Symbol BernoulliWeights::draw(Rng& rng) const {
  const double u = rng.uniform();
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < p_.size(); ++i) {
    if (p_[i] <= 0.0) continue;
    last_positive = i;
    if (u < cumulative_[i]) return static_cast<Symbol>(i);
  }
  // u fell into the rounding slack above the last partial sum
  return static_cast<Symbol>(last_positive);
}

// ---------------------------------------------------------------- words

SymbolWord SymbolWord::shifted(std::size_t by) const {
  SymbolWord out;
  if (by < symbols.size()) out.symbols.assign(symbols.begin() + static_cast<std::ptrdiff_t>(by), symbols.end());
  return out;
}

SymbolWord SymbolWord::prefix(std::size_t n) const {
  SymbolWord out;
  out.symbols.assign(symbols.begin(), symbols.begin() + static_cast<std::ptrdiff_t>(std::min(n, symbols.size())));
  return out;
}

void require_symbols(const SymbolWord& w, std::size_t alphabet) {
  for (Symbol s : w.symbols) {
    if (s >= alphabet) {
      throw InvalidInput("symbol " + std::to_string(s) + " outside alphabet of size " + std::to_string(alphabet));
    }
  }
}

SymbolWord sample_word(const BernoulliWeights& w, std::size_t n, Rng& rng) {
  SymbolWord out;
  out.symbols.resize(n);
  for (auto& s : out.symbols) s = w.draw(rng);
  return out;
}

Matrix word_product(std::span<const Matrix> maps, const SymbolWord& w) {
  if (maps.empty()) throw InvalidInput("word_product: no matrices");
  require_symbols(w, maps.size());
  const auto d = maps.front().rows();
  Matrix out = Matrix::Identity(d, d);
  for (Symbol s : w.symbols) out = out * maps[s];
  return out;
}

int require_contractive_tuple(std::span<const Matrix> maps, const LinalgTolerances& tol) {
  if (maps.empty()) throw InvalidInput("empty matrix tuple");
  const auto d = maps.front().rows();
  for (std::size_t k = 0; k < maps.size(); ++k) {
    require_square_finite(maps[k], "map matrix");
    if (maps[k].rows() != d) throw DimensionMismatch("matrices of different dimensions in one tuple");
    if (!is_contractive_invertible(maps[k], tol)) {
      throw InvalidInput("matrix " + std::to_string(k + 1) + " is not contractive invertible");
    }
  }
  return static_cast<int>(d);
}

double entropy(const BernoulliWeights& w) {
  double h = 0.0;
  for (double p : w.values()) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double expected_log_det_rate(std::span<const Matrix> maps, const BernoulliWeights& w) {
  if (maps.size() != w.size()) throw InvalidInput("weights and maps differ in length");
  double rate = 0.0;
  for (std::size_t k = 0; k < maps.size(); ++k) {
    if (w[k] > 0.0) rate -= w[k] * std::log(std::abs(maps[k].determinant()));
  }
  return rate;
}

// ---------------------------------------------------------------- spectrum

ConservationCheck conservation_check(const LyapunovSpectrum& s, std::span<const Matrix> maps,
                                     const BernoulliWeights& w) {
  const double rate = expected_log_det_rate(maps, w);
  ConservationCheck c;
  c.residual = s.total() - rate;
  if (const auto se = s.total_error()) {
    // Equal determinants give a zero trial spread; rounding then dominates.
    const double rounding = std::numeric_limits<double>::epsilon() * static_cast<double>(s.steps + 1) *
                            std::max(1.0, std::abs(rate)) * static_cast<double>(s.dim());
    c.combined_error = std::hypot(*se, rounding);
    c.holds = std::abs(c.residual) <= 3.0 * *c.combined_error;
  }
  return c;
}

std::optional<double> LyapunovSpectrum::total_error() const {
  if (trials < 2) return std::nullopt;
  const auto m = static_cast<double>(trial_partial_sums.size());
  double mean = 0.0;
  for (const auto& t : trial_partial_sums) mean += t.back();
  mean /= m;
  double ss = 0.0;
  for (const auto& t : trial_partial_sums) ss += (t.back() - mean) * (t.back() - mean);
  return std::sqrt(ss / (m - 1.0) / m);
}

std::vector<int> detect_multiplicities(std::span<const double> chi, double threshold) {
  std::vector<int> blocks;
  if (chi.empty()) return blocks;
  blocks.push_back(1);
  for (std::size_t j = 1; j < chi.size(); ++j) {
    if (chi[j] - chi[j - 1] < threshold) {
      ++blocks.back();
    } else {
      blocks.push_back(1);
    }
  }
  return blocks;
}

namespace {

struct MeanAndError {
  std::vector<double> mean;
  std::optional<std::vector<double>> error;
};

MeanAndError summarize(const std::vector<std::vector<double>>& rows) {
  const std::size_t m = rows.size();
  const std::size_t d = rows.front().size();
  MeanAndError out;
  out.mean.assign(d, 0.0);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < d; ++j) out.mean[j] += r[j];
  }
  for (auto& x : out.mean) x /= static_cast<double>(m);
  if (m >= 2) {
    std::vector<double> err(d, 0.0);
    for (const auto& r : rows) {
      for (std::size_t j = 0; j < d; ++j) err[j] += (r[j] - out.mean[j]) * (r[j] - out.mean[j]);
    }
    for (auto& e : err) e = std::sqrt(e / static_cast<double>(m - 1) / static_cast<double>(m));
    out.error = std::move(err);
  }
  return out;
}

}  // namespace

LyapunovSpectrum lyapunov_spectrum(std::span<const Matrix> maps, const BernoulliWeights& w,
                                   const LyapunovOptions& options, const Rng& rng) {
  const int d = require_contractive_tuple(maps);
  if (w.size() != maps.size()) throw InvalidInput("weights and maps differ in length");
  if (options.steps < 100) throw InvalidInput("lyapunov_spectrum needs at least 100 steps");
  if (options.trials < 1) throw InvalidInput("lyapunov_spectrum needs at least one trial");
  const std::size_t every = std::max<std::size_t>(1, options.renormalize_every);

  // Singular values of A_{i_0}...A_{i_{n-1}} equal those of its transpose,
  // which is a forward product of transposes and can be streamed.
  std::vector<Matrix> transposed;
  transposed.reserve(maps.size());
  for (const auto& a : maps) transposed.push_back(a.transpose());

  std::vector<Vector> accumulated(options.trials);
  parallel_for(options.trials, [&](std::size_t t) {
    Rng trial_rng = rng.derive(t);
    Matrix frame = trial_rng.random_frame(d, d);
    Vector acc = Vector::Zero(d);
    Vector logs;
    detail::RenormSchedule schedule(transposed, every);
    const auto renormalize = [&] {
      frame = orthonormalize(frame, &logs);
      acc += logs;
      schedule.reset();
    };
    for (std::size_t k = 0; k < options.steps; ++k) {
      const Symbol s = w.draw(trial_rng);
      if (schedule.before(s)) renormalize();
      frame = transposed[s] * frame;
      if (schedule.after(s) || k + 1 == options.steps) renormalize();
    }
    accumulated[t] = acc;
  });

  const auto n = static_cast<double>(options.steps);
  LyapunovSpectrum out;
  out.steps = options.steps;
  out.trials = options.trials;
  std::vector<std::vector<double>> trial_chi;
  trial_chi.reserve(options.trials);
  for (const auto& acc : accumulated) {
    std::vector<double> chi(static_cast<std::size_t>(d));
    std::vector<double> partial(static_cast<std::size_t>(d));
    double running = 0.0;
    for (int j = 0; j < d; ++j) {
      chi[static_cast<std::size_t>(j)] = -acc(j) / n;
      running += -acc(j) / n;
      partial[static_cast<std::size_t>(j)] = running;
    }
    trial_chi.push_back(std::move(chi));
    out.trial_partial_sums.push_back(std::move(partial));
  }

  auto chi_summary = summarize(trial_chi);
  auto partial_summary = summarize(out.trial_partial_sums);
  out.chi = std::move(chi_summary.mean);
  out.standard_error = std::move(chi_summary.error);
  out.partial_sums = std::move(partial_summary.mean);
  out.partial_sum_error = std::move(partial_summary.error);
  // Within a block the QR ordering is only approximate.
  if (!std::is_sorted(out.chi.begin(), out.chi.end())) std::sort(out.chi.begin(), out.chi.end());

  const double mean_chi = std::accumulate(out.chi.begin(), out.chi.end(), 0.0) / d;
  out.gap_threshold = options.gap_fraction * mean_chi;
  out.multiplicities = detect_multiplicities(out.chi, out.gap_threshold);
  return out;
}

}  // namespace affdim
