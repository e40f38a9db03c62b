#pragma once

// Reference computations that share no code with the library.  They are
// slow and only meant for small d.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "affdim/cocycle.hpp"
#include "affdim/dimension.hpp"
#include "affdim/measure.hpp"

namespace oracle {

using affdim::Matrix;
using affdim::Vector;

// Leibniz expansion over all permutations.
inline double leibniz_det(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double total = 0.0;
  do {
    int inversions = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inversions;
    double term = inversions % 2 ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) term *= a(i, perm[i]);
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

inline double minor_of(const Matrix& a, const std::vector<int>& rows, const std::vector<int>& cols) {
  Matrix s(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) s(i, j) = a(rows[i], cols[j]);
  return leibniz_det(s);
}

// Increasing p-subsets of {0..d-1}, lexicographic, by recursion.
inline void subsets(int d, int p, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == p) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < d; ++i) {
    cur.push_back(i);
    subsets(d, p, i + 1, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::vector<int>> subsets(int d, int p) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  subsets(d, p, 0, cur, out);
  return out;
}

inline Matrix compound(const Matrix& a, int p) {
  const auto idx = subsets(static_cast<int>(a.rows()), p);
  Matrix c(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) c(i, j) = minor_of(a, idx[i], idx[j]);
  return c;
}

// Square roots of the eigenvalues of A^T A, ascending.
inline std::vector<double> singular_values(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.transpose() * a);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(i))));
  std::sort(out.begin(), out.end());
  return out;
}

inline bool all_minors_positive(const Matrix& a, double eps = 1e-12) {
  const int d = static_cast<int>(a.rows());
  for (int p = 1; p < d; ++p)
    for (const auto& r : subsets(d, p))
      for (const auto& c : subsets(d, p))
        if (minor_of(a, r, c) <= eps) return false;
  return true;
}

// Gaussian matrix rescaled so that its largest singular value is `top`.
// Rejects badly conditioned draws so that determinants stay meaningful.
inline Matrix random_contraction(std::mt19937_64& gen, int d, double top, double max_cond = 50.0) {
  std::normal_distribution<double> g;
  for (;;) {
    Matrix a(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = g(gen);
    const auto sv = singular_values(a);
    if (sv.front() <= 0.0 || sv.back() / sv.front() > max_cond) continue;
    return a * (top / sv.back());
  }
}

// L_1 ... L_{d-1} diag U_{d-1} ... U_1 with positive bidiagonal factors, the
// standard parametrisation of totally positive matrices; rescaled to `top`.
inline Matrix random_stp(std::mt19937_64& gen, int d, double top) {
  std::uniform_real_distribution<double> u(0.3, 1.5);
  Matrix m = Matrix::Identity(d, d);
  for (int k = 0; k < d - 1; ++k) {
    Matrix l = Matrix::Identity(d, d);
    for (int i = 1; i < d; ++i) l(i, i - 1) = u(gen);
    m = m * l;
  }
  Matrix diag = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) diag(i, i) = u(gen);
  m = m * diag;
  for (int k = 0; k < d - 1; ++k) {
    Matrix up = Matrix::Identity(d, d);
    for (int i = 1; i < d; ++i) up(i - 1, i) = u(gen);
    m = m * up;
  }
  return m * (top / singular_values(m).back());
}

inline Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

inline Matrix rotation(double theta) {
  Matrix r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

// k - 1 + (h - chi_1 - ... - chi_{k-1}) / chi_k evaluated at every k.
inline double lyapunov_dimension_bruteforce(double h, const std::vector<double>& chi) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= chi.size(); ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < k; ++i) s += chi[i];
    best = std::min(best, static_cast<double>(k) - 1.0 + (h - s) / chi[k - 1]);
  }
  return best;
}

inline double shannon(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0) h -= x * std::log(x);
  return h;
}

// dim = H(p)/log m + (1/log n - 1/log m) H(rows).
inline double bedford_mcmullen(const std::vector<std::pair<int, int>>& digits, const std::vector<double>& p, int m,
                               int n) {
  std::vector<double> rows(static_cast<std::size_t>(n), 0.0);
  for (std::size_t k = 0; k < digits.size(); ++k) rows[static_cast<std::size_t>(digits[k].second)] += p[k];
  return shannon(p) / std::log(m) + (1.0 / std::log(n) - 1.0 / std::log(m)) * shannon(rows);
}

// Both sides of the telescoping identity, evaluated term by term.
inline std::pair<double, double> telescoping_sides(const std::vector<double>& H, const std::vector<double>& chi) {
  const std::size_t d = chi.size();
  double lhs = (H[0] - H[d]) / chi[d - 1];
  for (std::size_t i = 1; i < d; ++i) {
    double inner = 0.0;
    for (std::size_t k = 0; k < i; ++k) inner += (H[k] - H[k + 1]) / chi[k];
    lhs += (chi[i] - chi[i - 1]) / chi[d - 1] * inner;
  }
  double rhs = 0.0;
  for (std::size_t j = 0; j < d; ++j) rhs += (H[j] - H[j + 1]) / chi[j];
  return {lhs, rhs};
}

}  // namespace oracle

namespace fixtures {

using affdim::AffineMap;
using affdim::BernoulliWeights;
using affdim::IfsSystem;
using affdim::Matrix;
using affdim::Vector;

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline IfsSystem cantor(std::vector<double> p = {0.5, 0.5}) {
  Matrix a(1, 1);
  a(0, 0) = 1.0 / 3.0;
  return IfsSystem({{a, vec({0.0})}, {a, vec({2.0 / 3.0})}}, BernoulliWeights(std::move(p)));
}

inline IfsSystem bm_carpet() {
  const std::vector<affdim::CarpetDigit> digits{{0, 0}, {1, 0}, {2, 1}};
  const std::vector<double> p(3, 1.0 / 3.0);
  return affdim::bedford_mcmullen_ifs(digits, p, 3, 2);
}

// {diag(1/3, 1/2)} twice, the diagonal oracle tuple.
inline std::vector<Matrix> diag_tuple() { return {oracle::diag2(1.0 / 3, 0.5), oracle::diag2(1.0 / 3, 0.5)}; }

inline std::vector<Matrix> conformal_tuple() {
  return {0.5 * oracle::rotation(0.7), 0.5 * oracle::rotation(2.1)};
}

inline std::vector<Matrix> pascal_stp_tuple() {
  Matrix a(3, 3);
  a << 1, 1, 1, 1, 2, 3, 1, 3, 6;
  Matrix b(3, 3);
  b << 5, 7, 4, 7, 11, 9, 2, 5, 8;
  return {0.1 * a, 0.04 * b};
}

}  // namespace fixtures
