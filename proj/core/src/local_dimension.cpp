#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_map>

#include "affdim/errors.hpp"
#include "affdim/measure.hpp"
#include "affdim/parallel.hpp"

namespace affdim {

namespace {

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  return sxy / sxx;
}

// Uniform grid on the leading (up to three) coordinates.
class Grid {
 public:
  Grid(const Matrix& points, double cell) : points_(points), cell_(cell), dims_(std::min<int>(3, points.rows())) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      cells_[key(cell_of(points.col(j)))].push_back(static_cast<std::uint32_t>(j));
    }
  }

  template <class Visit>
  void neighbours(const Eigen::Ref<const Vector>& x, Visit&& visit) const {
    const auto base = cell_of(x);
    int total = 1;
    for (int k = 0; k < dims_; ++k) total *= 3;
    std::array<std::int64_t, 3> c{};
    for (int code = 0; code < total; ++code) {
      int rest = code;
      for (int k = 0; k < dims_; ++k) {
        c[static_cast<std::size_t>(k)] = base[static_cast<std::size_t>(k)] + rest % 3 - 1;
        rest /= 3;
      }
      const auto it = cells_.find(key(c));
      if (it == cells_.end()) continue;
      for (std::uint32_t j : it->second) visit(j);
    }
  }

 private:
  std::array<std::int64_t, 3> cell_of(const Eigen::Ref<const Vector>& x) const {
    std::array<std::int64_t, 3> c{};
    for (int k = 0; k < dims_; ++k) c[static_cast<std::size_t>(k)] = static_cast<std::int64_t>(std::floor(x(k) / cell_));
    return c;
  }
  static std::uint64_t key(const std::array<std::int64_t, 3>& c) {
    std::uint64_t h = 0;
    for (auto v : c) h = mix_seed(h ^ static_cast<std::uint64_t>(v));
    return h;
  }

  const Matrix& points_;
  double cell_;
  int dims_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

double cloud_diameter(const Matrix& points) {
  const Vector span = points.rowwise().maxCoeff() - points.rowwise().minCoeff();
  return span.maxCoeff() * std::sqrt(static_cast<double>(points.rows()));
}

}  // namespace

LocalDimensionResult local_dimension_estimate(const PointCloud& cloud, const LocalDimensionOptions& options,
                                              const Rng& rng) {
  const std::size_t m = cloud.size();
  if (m < 2) throw InvalidInput("local_dimension_estimate needs at least two points");
  if (options.radii < 2 || !(options.ratio > 0.0 && options.ratio < 1.0)) {
    throw InvalidInput("radius grid needs at least two radii and a ratio in (0, 1)");
  }
  double r_max = options.r_max.value_or(cloud_diameter(cloud.points) / 10.0);
  if (!(r_max > 0.0)) r_max = 1.0;  // all points coincide

  LocalDimensionResult out;
  std::vector<double> log_r;
  for (std::size_t k = 0; k < options.radii; ++k) {
    out.radii.push_back(r_max * std::pow(options.ratio, static_cast<double>(k)));
    log_r.push_back(std::log(out.radii.back()));
  }

  // centers: first c entries of a seeded partial shuffle
  const std::size_t c = std::min(options.centers, m);
  std::vector<std::uint32_t> order(m);
  std::iota(order.begin(), order.end(), 0U);
  Rng pick = rng.derive(0);
  for (std::size_t k = 0; k < c; ++k) {
    const auto j = k + static_cast<std::size_t>(pick.uniform() * static_cast<double>(m - k));
    std::swap(order[k], order[std::min(j, m - 1)]);
  }

  const Grid grid(cloud.points, r_max);
  const double r2 = r_max * r_max;
  const double others = static_cast<double>(m - 1);
  std::vector<std::optional<double>> slopes(c);
  parallel_for(c, [&](std::size_t s) {
    const std::uint32_t center = order[s];
    const auto x = cloud.points.col(center);
    std::vector<double> dist2;
    grid.neighbours(x, [&](std::uint32_t j) {
      if (j == center) return;
      const double q = (cloud.points.col(j) - x).squaredNorm();
      if (q <= r2) dist2.push_back(q);
    });
    std::sort(dist2.begin(), dist2.end());
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t k = 0; k < out.radii.size(); ++k) {
      const double rr = out.radii[k] * out.radii[k];
      const auto count = std::upper_bound(dist2.begin(), dist2.end(), rr) - dist2.begin();
      if (count == 0) continue;
      xs.push_back(log_r[k]);
      ys.push_back(std::log(static_cast<double>(count) / others));
    }
    if (xs.size() >= options.min_usable_radii) slopes[s] = ls_slope(xs, ys);
  });
  for (const auto& s : slopes) {
    if (s) {
      out.slopes.push_back(*s);
    } else {
      ++out.skipped_centers;
    }
  }
  if (out.slopes.empty()) {
    throw Inconclusive("no center had enough non-empty balls for a slope fit", 0.0);
  }
  std::vector<double> sorted = out.slopes;
  std::sort(sorted.begin(), sorted.end());
  out.median = quantile(sorted, 0.5);
  out.q1 = quantile(sorted, 0.25);
  out.q3 = quantile(sorted, 0.75);
  return out;
}

BoxCountResult box_counting_dimension(const PointCloud& cloud, double min_occupancy) {
  const std::size_t m = cloud.size();
  if (m < 2) throw InvalidInput("box_counting_dimension needs at least two points");
  const int d = cloud.dim();
  const Vector lo = cloud.points.rowwise().minCoeff();
  const double span = (cloud.points.rowwise().maxCoeff() - lo).maxCoeff() * (1.0 + 1e-9);
  BoxCountResult out;
  if (!(span > 0.0)) return out;  // a single atom has dimension 0

  const auto md = static_cast<double>(m);
  std::vector<std::int64_t> keys(m * static_cast<std::size_t>(d));
  std::vector<std::uint32_t> idx(m);
  for (int k = 1; k < 60; ++k) {
    const double side = std::ldexp(span, -k);
    for (std::size_t j = 0; j < m; ++j) {
      for (int r = 0; r < d; ++r) {
        keys[j * static_cast<std::size_t>(d) + static_cast<std::size_t>(r)] =
            static_cast<std::int64_t>(std::floor((cloud.points(r, static_cast<Eigen::Index>(j)) - lo(r)) / side));
      }
    }
    std::iota(idx.begin(), idx.end(), 0U);
    const auto du = static_cast<std::size_t>(d);
    std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
      return std::lexicographical_compare(keys.begin() + a * du, keys.begin() + (a + 1) * du, keys.begin() + b * du,
                                          keys.begin() + (b + 1) * du);
    });
    double entropy = 0.0;
    std::size_t occupied = 0;
    std::size_t run = 0;
    for (std::size_t j = 0; j < m; ++j) {
      ++run;
      const bool last = j + 1 == m || !std::equal(keys.begin() + idx[j] * du, keys.begin() + (idx[j] + 1) * du,
                                                  keys.begin() + idx[j + 1] * du);
      if (last) {
        const double q = static_cast<double>(run) / md;
        entropy -= q * std::log(q);
        ++occupied;
        run = 0;
      }
    }
    if (static_cast<double>(occupied) > md / min_occupancy) break;
    out.levels.push_back(k);
    out.entropies.push_back(entropy);
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t j = 0; j < out.levels.size(); ++j) {
    if (out.levels[j] < 2) continue;
    xs.push_back(out.levels[j] * std::log(2.0));
    ys.push_back(out.entropies[j]);
  }
  if (xs.size() < 2) throw Inconclusive("too few dyadic levels below the occupancy limit", static_cast<double>(xs.size()));
  out.dimension = ls_slope(xs, ys);
  return out;
}

}  // namespace affdim
