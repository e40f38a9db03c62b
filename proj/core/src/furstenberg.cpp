#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "affdim/cocycle.hpp"
#include "affdim/errors.hpp"
#include "affdim/parallel.hpp"
#include "internal.hpp"

namespace affdim {

namespace {

std::vector<int> resolve_blocks(std::span<const int> multiplicities, int d) {
  if (multiplicities.empty()) return std::vector<int>(static_cast<std::size_t>(d), 1);
  int sum = 0;
  for (int m : multiplicities) {
    if (m < 1) throw InvalidInput("multiplicities must be positive");
    sum += m;
  }
  if (sum != d) throw InvalidInput("multiplicities do not partition the dimension");
  return {multiplicities.begin(), multiplicities.end()};
}

}  // namespace

FlagChain oseledets_fast_flag(std::span<const Matrix> maps, const SymbolWord& word, std::size_t depth,
                              std::span<const int> multiplicities, const OseledetsOptions& options) {
  const int d = require_contractive_tuple(maps);
  require_symbols(word, maps.size());
  if (word.size() < depth + 1) {
    throw InvalidInput("oseledets_fast_flag: word shorter than depth + 1");
  }
  const auto blocks = resolve_blocks(multiplicities, d);
  if (blocks.size() < 2) {
    throw Inconclusive("single Lyapunov block: there is no Oseledets flag to estimate", 0.0);
  }
  const std::size_t every = std::max<std::size_t>(1, options.renormalize_every);

  // Span of the slowest directions of A_{i_n}^{-1}...A_{i_0}^{-1} is the
  // dominant image of A_{i_0}...A_{i_n}; push a frame through it right to left.
  Matrix frame = detail::generic_frame(d);
  Vector logs;
  detail::RenormSchedule schedule(maps, every);
  const auto renormalize = [&] {
    frame = orthonormalize(frame, &logs);
    schedule.reset();
  };
  for (std::size_t k = depth + 1; k-- > 0;) {
    if (schedule.before(word[k])) renormalize();
    frame = maps[word[k]] * frame;
    if (schedule.after(word[k]) || k == 0) renormalize();
  }

  // The gaps are read from the singular values of the product itself: the
  // pushed frame's growth rates only approach them as the depth grows.
  std::vector<std::vector<Matrix>> compounds;
  for (const auto& a : maps) compounds.push_back(detail::CompoundProduct::compounds_of(a));
  detail::CompoundProduct product(d);
  for (std::size_t k = 0; k <= depth; ++k) product.right_multiply(compounds[word[k]]);
  const auto log_alpha = product.log_singular_values();

  const double required = std::log(10.0 / options.angle_tolerance);
  double min_gap = std::numeric_limits<double>::infinity();
  std::vector<int> boundaries;
  int c = 0;
  for (std::size_t j = 0; j + 1 < blocks.size(); ++j) {
    c += blocks[j];
    boundaries.push_back(c);
    min_gap = std::min(min_gap, log_alpha[static_cast<std::size_t>(c - 1)] - log_alpha[static_cast<std::size_t>(c)]);
  }
  if (min_gap < required) {
    throw Inconclusive("insufficient spectral gap at depth " + std::to_string(depth) + ": observed log-gap " +
                           std::to_string(min_gap) + ", need " + std::to_string(required),
                       min_gap);
  }
  std::vector<SubspaceFrame> frames;
  for (auto it = boundaries.rbegin(); it != boundaries.rend(); ++it) {
    frames.push_back(SubspaceFrame::from_orthonormal(frame.leftCols(*it)));
  }
  return FlagChain::create(std::move(frames));
}

std::vector<FlagSample> furstenberg_sample(std::span<const Matrix> maps, const BernoulliWeights& w,
                                           std::span<const int> multiplicities,
                                           const FurstenbergOptions& options, const Rng& rng) {
  const int d = require_contractive_tuple(maps);
  if (w.size() != maps.size()) throw InvalidInput("weights and maps differ in length");
  const auto blocks = resolve_blocks(multiplicities, d);
  if (blocks.size() < 2) {
    throw Inconclusive("no spectral gap: the Furstenberg flag space is trivial", 0.0);
  }
  std::vector<int> dims;
  int removed = 0;
  for (std::size_t j = 0; j + 1 < blocks.size(); ++j) {
    removed += blocks[j];
    dims.push_back(d - removed);
  }
  std::vector<Matrix> inverses;
  for (const auto& a : maps) inverses.push_back(a.inverse());
  const std::size_t every = std::max<std::size_t>(1, options.renormalize_every);

  const detail::RenormSchedule base_schedule(inverses, every);

  std::vector<std::optional<FlagSample>> slots(options.count);
  parallel_for(options.count, [&](std::size_t s) {
    Rng sample_rng = rng.derive(s);
    Matrix frame = sample_rng.random_frame(d, d);
    SymbolWord past = sample_word(w, options.iterations, sample_rng);
    auto schedule = base_schedule;
    for (std::size_t k = past.size(); k-- > 0;) {
      if (schedule.before(past[k])) {
        frame = orthonormalize(frame);
        schedule.reset();
      }
      frame = inverses[past[k]] * frame;
      if (schedule.after(past[k]) || k == 0) {
        frame = orthonormalize(frame);
        schedule.reset();
      }
    }
    std::vector<SubspaceFrame> frames;
    for (int k : dims) frames.push_back(SubspaceFrame::from_orthonormal(frame.leftCols(k)));
    slots[s] = FlagSample{FlagChain::create(std::move(frames)), std::move(past)};
  });
  std::vector<FlagSample> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::vector<FlagSample> furstenberg_step(std::span<const Matrix> maps, const BernoulliWeights& w,
                                         std::span<const FlagSample> samples, const Rng& rng) {
  require_contractive_tuple(maps);
  std::vector<Matrix> inverses;
  for (const auto& a : maps) inverses.push_back(a.inverse());
  std::vector<std::optional<FlagSample>> slots(samples.size());
  parallel_for(samples.size(), [&](std::size_t s) {
    Rng step_rng = rng.derive(s);
    const Symbol i = w.draw(step_rng);
    std::vector<SubspaceFrame> frames;
    for (const auto& f : samples[s].flag.frames()) frames.push_back(f.mapped(inverses[i]));
    SymbolWord past;
    past.symbols.reserve(samples[s].word_prefix.size() + 1);
    past.symbols.push_back(i);
    past.symbols.insert(past.symbols.end(), samples[s].word_prefix.symbols.begin(),
                        samples[s].word_prefix.symbols.end());
    slots[s] = FlagSample{FlagChain::create(std::move(frames)), std::move(past)};
  });
  std::vector<FlagSample> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

double flag_statistic(const FlagChain& flag) {
  const SubspaceFrame& v1 = flag[0];
  if (flag.ambient_dim() == 2) {
    const double angle = std::atan2(v1.frame()(1, 0), v1.frame()(0, 0));
    double folded = std::fmod(angle, std::numbers::pi);
    if (folded < 0) folded += std::numbers::pi;
    return folded;
  }
  std::vector<int> axes(static_cast<std::size_t>(v1.dim()));
  std::iota(axes.begin(), axes.end(), 0);
  return principal_angle_distance(v1, SubspaceFrame::coordinate(flag.ambient_dim(), axes));
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidInput("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double best = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

double furstenberg_stationarity_ks(std::span<const Matrix> maps, const BernoulliWeights& w,
                                   std::span<const FlagSample> samples, const Rng& rng) {
  const auto pushed = furstenberg_step(maps, w, samples, rng);
  std::vector<double> before;
  std::vector<double> after;
  before.reserve(samples.size());
  after.reserve(pushed.size());
  for (const auto& s : samples) before.push_back(flag_statistic(s.flag));
  for (const auto& s : pushed) after.push_back(flag_statistic(s.flag));
  return ks_statistic(std::move(before), std::move(after));
}

}  // namespace affdim
