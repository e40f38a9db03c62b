#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "affdim/errors.hpp"
#include "affdim/measure.hpp"

namespace affdim {

std::string to_string(SeparationStatus s) {
  switch (s) {
    case SeparationStatus::ssc_verified: return "ssc-verified";
    case SeparationStatus::overlap_detected: return "overlap-detected";
    case SeparationStatus::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Box attractor_box(const IfsSystem& ifs) {
  const int d = ifs.dim();
  const double r = ifs.bounding_radius();
  Vector lower = Vector::Constant(d, -r);
  Vector upper = Vector::Constant(d, r);
  for (int iter = 0; iter < 10000; ++iter) {
    const Vector c = (lower + upper) / 2.0;
    const Vector h = (upper - lower) / 2.0;
    Vector lo = Vector::Constant(d, std::numeric_limits<double>::infinity());
    Vector hi = -lo;
    for (const auto& f : ifs.maps()) {
      const Vector center = f.linear * c + f.translation;
      const Vector half = f.linear.cwiseAbs() * h;
      lo = lo.cwiseMin(center - half);
      hi = hi.cwiseMax(center + half);
    }
    lo = lo.cwiseMax(lower);
    hi = hi.cwiseMin(upper);
    const double change = std::max((lo - lower).cwiseAbs().maxCoeff(), (hi - upper).cwiseAbs().maxCoeff());
    lower = lo;
    upper = hi;
    if (change <= 1e-15 * std::max(1.0, r)) break;
  }
  return {lower, upper};
}

bool sosc_certificate(const IfsSystem& ifs, std::string* detail) {
  const auto fail = [&](std::string why) {
    if (detail != nullptr) *detail = std::move(why);
    return false;
  };
  const Box k = attractor_box(ifs);
  const Vector c = (k.lower + k.upper) / 2.0;
  const Vector h = (k.upper - k.lower) / 2.0;
  const double scale = 2.0 * h.norm();
  if (!(h.minCoeff() > 1e-12 * std::max(scale, 1.0))) return fail("attractor box has empty interior");
  const double tol = 1e-12 * scale;
  const std::size_t n = ifs.size();
  std::vector<Vector> centers;
  std::vector<Vector> halves;
  for (std::size_t i = 0; i < n; ++i) {
    centers.push_back(ifs[i].linear * c + ifs[i].translation);
    halves.push_back(ifs[i].linear.cwiseAbs() * h);
    if (((centers[i] - halves[i]) - k.lower).minCoeff() < -tol || (k.upper - (centers[i] + halves[i])).minCoeff() < -tol) {
      return fail("hull of map " + std::to_string(i + 1) + " leaves the attractor box");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vector gap = (centers[i] - centers[j]).cwiseAbs() - (halves[i] + halves[j]);
      if (gap.maxCoeff() < -tol) {
        return fail("hulls of maps " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " overlap");
      }
    }
  }
  const int d = ifs.dim();
  const double margin = 1e-9 * scale;
  for (std::size_t i = 0; i < n; ++i) {
    const Vector fixed = (Matrix::Identity(d, d) - ifs[i].linear).partialPivLu().solve(ifs[i].translation);
    std::vector<Vector> candidates{fixed};
    for (std::size_t j = 0; j < n; ++j) candidates.push_back(ifs[j](fixed));
    for (const auto& x : candidates) {
      if ((x - k.lower).minCoeff() > margin && (k.upper - x).minCoeff() > margin) {
        if (detail != nullptr) *detail = "U = interior of the attractor box";
        return true;
      }
    }
  }
  return fail("no attractor point found in the interior of the attractor box");
}

namespace {

struct Cylinder {
  SymbolWord word;
  Matrix a;  // f_w(x) = a x + b
  Vector b;
};

Cylinder child(const Cylinder& c, const AffineMap& f, Symbol s) {
  Cylinder out{c.word, c.a * f.linear, c.a * f.translation + c.b};
  out.word.symbols.push_back(s);
  return out;
}

double hull_distance(const Cylinder& u, const Cylinder& v, const Vector& center, const Vector& half) {
  const Vector cu = u.a * center + u.b;
  const Vector cv = v.a * center + v.b;
  const Vector reach = u.a.cwiseAbs() * half + v.a.cwiseAbs() * half;
  const Vector gap = ((cu - cv).cwiseAbs() - reach).cwiseMax(0.0);
  return gap.norm();
}

}  // namespace

SeparationVerdict check_separation(const IfsSystem& ifs, std::size_t level, const SeparationOptions& options) {
  if (level == 0) throw InvalidInput("check_separation: level must be positive");
  SeparationVerdict verdict;
  verdict.level = level;
  verdict.sosc_verified = sosc_certificate(ifs, &verdict.sosc_detail);
  const std::size_t n = ifs.size();
  if (n == 1) {
    verdict.status = SeparationStatus::ssc_verified;
    verdict.gap = std::numeric_limits<double>::infinity();
    verdict.detail = "single map: nothing to separate";
    return verdict;
  }
  const Box k = attractor_box(ifs);
  const Vector center = (k.lower + k.upper) / 2.0;
  const Vector half = (k.upper - k.lower) / 2.0;
  const double scale = std::max(2.0 * half.norm(), std::numeric_limits<double>::min());
  const double slack = options.slack * scale;

  std::vector<Cylinder> first;
  const int d = ifs.dim();
  for (std::size_t i = 0; i < n; ++i) {
    first.push_back(child(Cylinder{{}, Matrix::Identity(d, d), Vector::Zero(d)}, ifs[i], static_cast<Symbol>(i)));
  }
  std::vector<std::pair<Cylinder, Cylinder>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(first[i], first[j]);
  }

  double gap = std::numeric_limits<double>::infinity();
  std::optional<SeparationWitness> closest;
  std::optional<SeparationWitness> unresolved;
  for (std::size_t l = 1; l <= level && !pairs.empty(); ++l) {
    std::vector<std::pair<Cylinder, Cylinder>> next;
    for (const auto& [u, v] : pairs) {
      if (verdict.pairs_examined == options.pair_budget) {
        verdict.status = SeparationStatus::inconclusive;
        verdict.witness = SeparationWitness{u.word, v.word, hull_distance(u, v, center, half)};
        verdict.detail = "pair budget exhausted at level " + std::to_string(l);
        return verdict;
      }
      ++verdict.pairs_examined;
      const double dist = hull_distance(u, v, center, half);
      const double map_scale = std::max(1.0, u.a.norm());
      if ((u.a - v.a).norm() <= options.coincidence * map_scale && (u.b - v.b).norm() <= options.coincidence * scale) {
        verdict.status = SeparationStatus::overlap_detected;
        verdict.witness = SeparationWitness{u.word, v.word, 0.0};
        verdict.detail = "cylinder maps coincide at level " + std::to_string(l);
        return verdict;
      }
      if (dist > slack) {
        if (dist < gap) {
          gap = dist;
          closest = SeparationWitness{u.word, v.word, dist};
        }
        continue;
      }
      if (l == level) {
        if (!unresolved) unresolved = SeparationWitness{u.word, v.word, dist};
        continue;
      }
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
          next.emplace_back(child(u, ifs[a], static_cast<Symbol>(a)), child(v, ifs[b], static_cast<Symbol>(b)));
        }
      }
      // queued pairs past the budget would never be examined
      if (verdict.pairs_examined + next.size() > options.pair_budget) {
        verdict.status = SeparationStatus::inconclusive;
        verdict.witness = SeparationWitness{u.word, v.word, dist};
        verdict.detail = "pair budget exhausted at level " + std::to_string(l);
        return verdict;
      }
    }
    pairs = std::move(next);
  }
  if (unresolved) {
    verdict.status = SeparationStatus::inconclusive;
    verdict.witness = unresolved;
    verdict.detail = "cylinder hulls still meet at level " + std::to_string(level);
    return verdict;
  }
  verdict.status = SeparationStatus::ssc_verified;
  verdict.gap = gap;
  verdict.witness = closest;
  verdict.detail = "all first-level cylinder pairs separated";
  return verdict;
}

}  // namespace affdim
