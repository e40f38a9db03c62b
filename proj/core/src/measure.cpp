#include "affdim/measure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "affdim/errors.hpp"
#include "affdim/parallel.hpp"

namespace affdim {

IfsSystem::IfsSystem(std::vector<AffineMap> maps, BernoulliWeights weights)
    : maps_(std::move(maps)), weights_(std::move(weights)) {
  if (maps_.empty()) throw InvalidInput("an IFS needs at least one map");
  if (weights_.size() != maps_.size()) {
    throw InvalidInput("IFS has " + std::to_string(maps_.size()) + " maps but " + std::to_string(weights_.size()) +
                       " weights");
  }
  for (const auto& f : maps_) linear_.push_back(f.linear);
  d_ = require_contractive_tuple(linear_);
  double max_t = 0.0;
  for (std::size_t i = 0; i < maps_.size(); ++i) {
    const auto& t = maps_[i].translation;
    if (t.size() != d_) {
      throw DimensionMismatch("translation " + std::to_string(i + 1) + " has length " + std::to_string(t.size()) +
                              ", expected " + std::to_string(d_));
    }
    if (!t.allFinite()) throw InvalidInput("translation " + std::to_string(i + 1) + " is not finite");
    max_t = std::max(max_t, t.norm());
    max_alpha1_ = std::max(max_alpha1_, operator_norm(maps_[i].linear));
  }
  radius_ = max_t / (1.0 - max_alpha1_);
}

ProjectedPoint natural_projection(const IfsSystem& ifs, const SymbolWord& word) {
  if (word.empty()) throw InvalidInput("natural_projection needs a non-empty word");
  require_symbols(word, ifs.size());
  Vector x = Vector::Zero(ifs.dim());
  double contraction = 1.0;
  for (std::size_t k = word.size(); k-- > 0;) {
    const auto& f = ifs[word[k]];
    x = f.linear * x + f.translation;
  }
  for (Symbol s : word.symbols) contraction *= operator_norm(ifs[s].linear);
  return {std::move(x), ifs.bounding_radius() * contraction};
}

std::size_t default_depth(const IfsSystem& ifs, double resolution, std::size_t samples) {
  if (!(resolution > 0.0)) throw InvalidInput("resolution must be positive");
  std::size_t depth = 1;
  const double r = ifs.bounding_radius();
  const double target = resolution / 10.0;
  if (r >= target) {
    auto n = static_cast<std::size_t>(std::ceil(std::log(target / r) / std::log(ifs.max_contraction())));
    // the bound is strict: step past an exact hit
    if (r * std::pow(ifs.max_contraction(), static_cast<double>(n)) >= target) ++n;
    depth = std::max(depth, n);
  }
  const double h = entropy(ifs.weights());
  if (samples > 0 && h > 0.0) {
    const double n = std::ceil(std::log(100.0 * static_cast<double>(samples)) / h);
    depth = std::max(depth, static_cast<std::size_t>(n));
  }
  return depth;
}

PointCloud sample_measure(const IfsSystem& ifs, std::size_t count, std::size_t depth, const Rng& rng) {
  if (count == 0) throw InvalidInput("sample_measure: count must be positive");
  if (depth == 0) throw InvalidInput("sample_measure: depth must be positive");
  constexpr std::size_t chunk = 1024;
  const std::size_t chunks = (count + chunk - 1) / chunk;
  const int d = ifs.dim();

  std::vector<double> log_alpha(ifs.size());
  for (std::size_t i = 0; i < ifs.size(); ++i) log_alpha[i] = std::log(operator_norm(ifs[i].linear));

  PointCloud cloud;
  cloud.points.resize(d, static_cast<Eigen::Index>(count));
  cloud.words.resize(count);
  cloud.error_bounds.resize(count);
  cloud.seed = rng.seed();
  cloud.depth = depth;
  parallel_for(chunks, [&](std::size_t c) {
    Rng chunk_rng = rng.derive(c);
    const std::size_t end = std::min(count, (c + 1) * chunk);
    Vector x(d);
    for (std::size_t j = c * chunk; j < end; ++j) {
      SymbolWord w = sample_word(ifs.weights(), depth, chunk_rng);
      x.setZero();
      double log_contraction = 0.0;
      for (std::size_t k = depth; k-- > 0;) {
        const auto& f = ifs[w[k]];
        x = f.linear * x + f.translation;
        log_contraction += log_alpha[w[k]];
      }
      cloud.points.col(static_cast<Eigen::Index>(j)) = x;
      cloud.error_bounds[j] = ifs.bounding_radius() * std::exp(log_contraction);
      cloud.words[j] = std::move(w);
    }
  });
  return cloud;
}

bool Box::contains(const Eigen::Ref<const Vector>& x) const {
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (x(k) < lower(k) || x(k) > upper(k)) return false;
  }
  return true;
}

SelfAffinityReport self_affinity_check(const PointCloud& cloud, const IfsSystem& ifs, std::span<const Box> boxes,
                                       std::size_t min_count) {
  if (cloud.dim() != ifs.dim()) throw DimensionMismatch("cloud and IFS dimensions differ");
  const std::size_t m = cloud.size();
  if (m == 0) throw InvalidInput("self_affinity_check: empty cloud");
  const auto& p = ifs.weights();
  const auto md = static_cast<double>(m);

  SelfAffinityReport report;
  for (const auto& box : boxes) {
    if (box.lower.size() != ifs.dim() || box.upper.size() != ifs.dim()) {
      throw DimensionMismatch("test box dimension differs from the IFS");
    }
    BoxCheck check{box};
    std::size_t inside = 0;
    double sum_diff = 0.0;
    double sum_diff_sq = 0.0;
    double rhs = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const auto x = cloud.points.col(static_cast<Eigen::Index>(j));
      const double in = box.contains(x) ? 1.0 : 0.0;
      double image = 0.0;
      for (std::size_t i = 0; i < ifs.size(); ++i) {
        if (p[i] > 0.0 && box.contains(ifs[i].linear * x + ifs[i].translation)) image += p[i];
      }
      inside += in > 0.0 ? 1 : 0;
      rhs += image;
      sum_diff += in - image;
      sum_diff_sq += (in - image) * (in - image);
    }
    check.lhs = static_cast<double>(inside) / md;
    check.rhs = rhs / md;
    check.discrepancy = std::abs(check.lhs - check.rhs);
    const double mean_diff = sum_diff / md;
    const double var_diff = std::max(0.0, sum_diff_sq / md - mean_diff * mean_diff);
    check.tolerance = 3.0 * std::max(std::sqrt(check.lhs / md), std::sqrt(var_diff / md));
    if (inside > 0 && inside < min_count) {
      check.skipped = true;
      ++report.skipped;
    } else {
      check.pass = check.discrepancy <= check.tolerance;
      report.all_pass = report.all_pass && check.pass;
      report.max_discrepancy = std::max(report.max_discrepancy, check.discrepancy);
    }
    report.boxes.push_back(std::move(check));
  }
  return report;
}

LiftResult lift_ifs(const IfsSystem& ifs, std::optional<double> rho) {
  const auto n = static_cast<double>(ifs.size());
  double min_alpha_d = 1.0;
  for (const auto& a : ifs.linear_parts()) min_alpha_d = std::min(min_alpha_d, singular_values(a)(0));
  const double bound = std::min(1.0 / n, min_alpha_d);
  const double r = rho.value_or(0.9 * bound);
  if (!(r > 0.0 && r < bound)) {
    throw InvalidInput("lift rho must satisfy 0 < rho < min{1/N, min alpha_d} = " + std::to_string(bound));
  }
  const int d = ifs.dim();
  std::vector<AffineMap> lifted;
  std::vector<double> tau;
  for (std::size_t i = 0; i < ifs.size(); ++i) {
    AffineMap f{Matrix::Zero(d + 1, d + 1), Vector::Zero(d + 1)};
    f.linear.topLeftCorner(d, d) = ifs[i].linear;
    f.linear(d, d) = r;
    f.translation.head(d) = ifs[i].translation;
    tau.push_back(static_cast<double>(i) / n);
    f.translation(d) = tau.back();
    lifted.push_back(std::move(f));
  }
  return {IfsSystem(std::move(lifted), ifs.weights()), r, std::move(tau)};
}

PointCloud project_cloud(const PointCloud& cloud, const SubspaceFrame& v) {
  if (v.ambient_dim() != cloud.dim()) throw DimensionMismatch("projection frame and cloud dimensions differ");
  PointCloud out;
  out.points = v.frame().transpose() * cloud.points;
  out.words = cloud.words;
  out.seed = cloud.seed;
  out.depth = cloud.depth;
  out.error_bounds = cloud.error_bounds;  // orthogonal projection is 1-Lipschitz
  return out;
}

}  // namespace affdim
