#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "affdim/domination.hpp"
#include "affdim/errors.hpp"
#include "internal.hpp"

namespace affdim {

namespace {

struct DominantImage {
  Matrix frame;  // orthonormal d x d, leading columns most expanded
  Vector log_r;  // accumulated log|R_jj|
};

// Pushes the generic frame through factors[order[0]] * ... applied right to
// left: the last listed factor acts first.
DominantImage push_frame(const std::vector<Matrix>& factors, const std::vector<Symbol>& order, int d,
                         std::size_t every) {
  DominantImage out{detail::generic_frame(d), Vector::Zero(d)};
  Vector logs;
  detail::RenormSchedule schedule(factors, every);
  const auto renormalize = [&] {
    out.frame = orthonormalize(out.frame, &logs);
    out.log_r += logs;
    schedule.reset();
  };
  for (std::size_t k = order.size(); k-- > 0;) {
    if (schedule.before(order[k])) renormalize();
    out.frame = factors[order[k]] * out.frame;
    if (schedule.after(order[k]) || k == 0) renormalize();
  }
  return out;
}

// F^i from (s_0, ..., s_{n-1}): dominant (d-i)-image of A_{s_0}^{-1} ... A_{s_{n-1}}^{-1}.
SubspaceFrame estimate_f(const std::vector<Matrix>& inverses, const std::vector<Symbol>& s, int d, int i,
                         std::size_t every) {
  const auto img = push_frame(inverses, s, d, every);
  return SubspaceFrame::from_orthonormal(img.frame.leftCols(d - i));
}

// E^i from past (p_0, ..., p_{n-1}) = (i_{-1}, ..., i_{-n}): dominant i-image of
// A_{p_0} A_{p_1} ... A_{p_{n-1}}.
SubspaceFrame estimate_e(std::span<const Matrix> maps, const std::vector<Symbol>& p, int d, int i,
                         std::size_t every) {
  const std::vector<Matrix> factors(maps.begin(), maps.end());
  const auto img = push_frame(factors, p, d, every);
  return SubspaceFrame::from_orthonormal(img.frame.leftCols(i));
}

// log(alpha_i / alpha_{i+1}) of A_{s_{n-1}} ... A_{s_0} (forward_last) or of
// A_{s_0} ... A_{s_{n-1}}, from compound norms.
double product_log_gap(const std::vector<std::vector<Matrix>>& compounds, const std::vector<Symbol>& s, int d, int i,
                       bool forward_last) {
  detail::CompoundProduct prod(d);
  for (Symbol x : s) {
    if (forward_last) {
      prod.left_multiply(compounds[x]);
    } else {
      prod.right_multiply(compounds[x]);
    }
  }
  const auto logs = prod.log_singular_values();
  return logs[static_cast<std::size_t>(i - 1)] - logs[static_cast<std::size_t>(i)];
}

// p-th compound of a d x k frame: minors with rows from I_p^d, columns from I_p^k.
Matrix rectangular_compound(const Matrix& frame, int p) {
  const auto rows = index_tuples(static_cast<int>(frame.rows()), p);
  const auto cols = index_tuples(static_cast<int>(frame.cols()), p);
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = minor(frame, rows[r], cols[c]);
    }
  }
  return out;
}

std::vector<Symbol> head(const SymbolWord& w, std::size_t from, std::size_t n) {
  return {w.symbols.begin() + static_cast<std::ptrdiff_t>(from),
          w.symbols.begin() + static_cast<std::ptrdiff_t>(from + n)};
}

}  // namespace

BundleEstimate strong_stable_bundle(std::span<const Matrix> maps, const SymbolWord& future,
                                    const SymbolWord& past, int i, std::size_t depth,
                                    const DominationReport& report, const BundleOptions& options) {
  const int d = require_contractive_tuple(maps);
  require_symbols(future, maps.size());
  require_symbols(past, maps.size());
  if (i < 1 || i > d - 1) throw InvalidInput("bundle index must satisfy 1 <= i <= d-1");
  if (report.d != d) throw DimensionMismatch("domination report is for a different dimension");
  if (!report.is_dominated(i)) {
    throw Refused("index " + std::to_string(i) + " is not in the dominated set; F^" + std::to_string(i) +
                  " is only defined under domination");
  }
  if (depth < 1) throw InvalidInput("bundle depth must be positive");
  if (future.size() < depth + 1) throw InvalidInput("future word shorter than depth + 1");
  if (past.size() < depth) throw InvalidInput("past word shorter than depth");
  const std::size_t every = std::max<std::size_t>(1, options.renormalize_every);

  std::vector<Matrix> inverses;
  for (const auto& a : maps) inverses.push_back(a.inverse());

  std::vector<std::vector<Matrix>> map_compounds;
  for (const auto& a : maps) map_compounds.push_back(detail::CompoundProduct::compounds_of(a));
  const double gap_f = product_log_gap(map_compounds, head(future, 0, depth), d, i, true);
  const double gap_e = product_log_gap(map_compounds, head(past, 0, depth), d, i, false);
  const double required = std::log(1.0 / options.gap_tolerance);
  const double observed = std::min(gap_f, gap_e);
  if (observed < required) {
    throw Inconclusive("depth " + std::to_string(depth) + " too small: observed log-gap " + std::to_string(observed) +
                           ", need " + std::to_string(required),
                       observed);
  }

  const SubspaceFrame f = estimate_f(inverses, head(future, 0, depth), d, i, every);
  const SubspaceFrame e = estimate_e(maps, head(past, 0, depth), d, i, every);
  BundleEstimate out{
      .index = i,
      .F = f,
      .E = e,
      .angle_lower_bound = minimum_angle_sine(f, e),
      .growth_ratios = {},
      .growth_constant = 0.0,
      .equivariance_residual_F = 0.0,
      .equivariance_residual_E = 0.0,
      .equivariance_ok = false,
      .cauchy_residual = std::nullopt,
      .observed_log_gap_F = gap_f,
      .observed_log_gap_E = gap_e,
      .future = future,
      .past = past,
  };

  // A_{i_0} F(ii) = F(sigma ii) and A_{i_0} E(ii) = E(sigma ii).
  const Matrix& a0 = maps[future[0]];
  const SubspaceFrame f_shift = estimate_f(inverses, head(future, 1, depth), d, i, every);
  out.equivariance_residual_F = principal_angle_distance(f.mapped(a0), f_shift);
  std::vector<Symbol> shifted_past{future[0]};
  const auto rest = head(past, 0, depth - 1);
  shifted_past.insert(shifted_past.end(), rest.begin(), rest.end());
  const SubspaceFrame e_shift = estimate_e(maps, shifted_past, d, i, every);
  out.equivariance_residual_E = principal_angle_distance(e.mapped(a0), e_shift);
  out.equivariance_ok = out.equivariance_residual_F <= options.equivariance_tolerance &&
                        out.equivariance_residual_E <= options.equivariance_tolerance;

  if (future.size() >= 2 * depth) {
    const SubspaceFrame deeper = estimate_f(inverses, head(future, 0, 2 * depth), d, i, every);
    out.cauchy_residual = principal_angle_distance(f, deeper);
  }

  // ||A^(n)|F(ii)|| = 1 / m(C_n | F(sigma^n ii)) with C_n = (A^(n))^{-1}.
  // C_n expands F(sigma^n ii), so rounding in that estimate is damped; pushing
  // F(ii) forward directly amplifies it by alpha_i / alpha_{i+1} per step.
  const int k = d - i;
  std::vector<std::vector<Matrix>> inverse_compounds;
  for (const auto& inv : inverses) inverse_compounds.push_back(detail::CompoundProduct::compounds_of(inv));
  const auto log_image_norm = [&](const Matrix& frame, int p, std::size_t n) {
    if (p == 0) return 0.0;
    Matrix v = rectangular_compound(frame, p);
    double scale = 0.0;
    for (std::size_t j = n; j-- > 0;) {
      v = inverse_compounds[future[j]][static_cast<std::size_t>(p - 1)] * v;
      const double m = v.cwiseAbs().maxCoeff();
      v /= m;
      scale += std::log(m);
    }
    return std::log(operator_norm(v)) + scale;
  };
  detail::CompoundProduct prod(d);
  const std::size_t horizon = std::min(depth, future.size() - depth);
  for (std::size_t n = 1; n <= horizon; ++n) {
    prod.left_multiply(map_compounds[future[n - 1]]);
    const Matrix fn = estimate_f(inverses, head(future, n, depth), d, i, every).frame();
    const double log_conorm = log_image_norm(fn, k, n) - log_image_norm(fn, k - 1, n);
    const double ratio = std::exp(-log_conorm - prod.log_singular_values()[static_cast<std::size_t>(i)]);
    out.growth_ratios.push_back(ratio);
    out.growth_constant = std::max(out.growth_constant, ratio);
  }
  return out;
}

SplittingResult splitting_subspaces(std::span<const BundleEstimate> bundles, double intersection_tol) {
  if (bundles.empty()) throw InvalidInput("splitting_subspaces: no bundles");
  const int d = bundles.front().F.ambient_dim();
  for (std::size_t j = 1; j < bundles.size(); ++j) {
    if (bundles[j].index <= bundles[j - 1].index) throw InvalidInput("bundles must be sorted by strictly increasing index");
  }
  SplittingResult out;
  out.spaces.push_back(bundles.front().E);
  for (std::size_t j = 1; j < bundles.size(); ++j) {
    const int expected = bundles[j].index - bundles[j - 1].index;
    auto e = subspace_intersection(bundles[j].E, bundles[j - 1].F, intersection_tol);
    const int got = e ? e->dim() : 0;
    if (got != expected) {
      throw InconsistentEstimate("E^" + std::to_string(bundles[j].index) + " cap F^" +
                                 std::to_string(bundles[j - 1].index) + " has dimension " + std::to_string(got) +
                                 ", expected " + std::to_string(expected));
    }
    out.spaces.push_back(*e);
  }
  out.spaces.push_back(bundles.back().F);

  out.min_pairwise_angle_sine = 1.0;
  for (std::size_t a = 0; a < out.spaces.size(); ++a) {
    for (std::size_t b = a + 1; b < out.spaces.size(); ++b) {
      out.min_pairwise_angle_sine = std::min(out.min_pairwise_angle_sine, minimum_angle_sine(out.spaces[a], out.spaces[b]));
    }
  }
  Matrix all(d, 0);
  for (const auto& s : out.spaces) {
    Matrix grown(d, all.cols() + s.dim());
    grown << all, s.frame();
    all = std::move(grown);
  }
  if (all.cols() != d) throw InconsistentEstimate("splitting subspaces do not have total dimension d");
  out.direct_sum_sigma_min = singular_values(all)(0);
  return out;
}

}  // namespace affdim
