#include "affdim/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "affdim/errors.hpp"

namespace affdim {

namespace {

void require_same_ambient(const SubspaceFrame& u, const SubspaceFrame& w) {
  if (u.ambient_dim() != w.ambient_dim()) {
    throw DimensionMismatch("subspaces live in R^" + std::to_string(u.ambient_dim()) +
                            " and R^" + std::to_string(w.ambient_dim()));
  }
}

void require_increasing(std::span<const int> idx, int d, const char* what) {
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] < 0 || idx[k] >= d) {
      throw InvalidInput(std::string(what) + " index out of range");
    }
    if (k > 0 && idx[k] <= idx[k - 1]) {
      throw InvalidInput(std::string(what) + " indices must be strictly increasing");
    }
  }
}

}  // namespace

void require_square_finite(const Matrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw InvalidInput(std::string(what) + " is not square");
  }
  if (a.rows() < 1 || a.rows() > kMaxDimension) {
    throw InvalidInput(std::string(what) + " dimension " + std::to_string(a.rows()) +
                       " outside the supported range 1.." + std::to_string(kMaxDimension));
  }
  if (!a.allFinite()) {
    throw InvalidInput(std::string(what) + " has non-finite entries");
  }
}

namespace {

// Singular values, descending, computed block by block: rows and columns are
// grouped into the connected components of the nonzero pattern, and each
// block is decomposed on its own.  Block-diagonal inputs (diagonal maps,
// lifted systems) thus keep their 1 x 1 entries exact instead of picking up
// the rounding of the SVD's internal rescaling.
Vector blockwise_singular_values(const Matrix& a) {
  const auto m = static_cast<int>(a.rows());
  const auto n = static_cast<int>(a.cols());
  std::vector<int> parent(static_cast<std::size_t>(m + n));
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    }
    return x;
  };
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      if (a(i, j) != 0.0) parent[static_cast<std::size_t>(find(i))] = find(m + j);
    }
  }
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(m + n));
  std::vector<std::vector<int>> cols(static_cast<std::size_t>(m + n));
  for (int i = 0; i < m; ++i) rows[static_cast<std::size_t>(find(i))].push_back(i);
  for (int j = 0; j < n; ++j) cols[static_cast<std::size_t>(find(m + j))].push_back(j);

  std::vector<double> values;
  for (std::size_t c = 0; c < rows.size(); ++c) {
    const auto& r = rows[c];
    const auto& k = cols[c];
    if (r.empty() || k.empty()) continue;
    if (r.size() == static_cast<std::size_t>(m) && k.size() == static_cast<std::size_t>(n)) {
      Eigen::JacobiSVD<Matrix> svd(a);
      return svd.singularValues();
    }
    if (r.size() == 1 && k.size() == 1) {
      values.push_back(std::abs(a(r[0], k[0])));
      continue;
    }
    Matrix block(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(k.size()));
    for (std::size_t x = 0; x < r.size(); ++x) {
      for (std::size_t y = 0; y < k.size(); ++y) {
        block(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = a(r[x], k[y]);
      }
    }
    Eigen::JacobiSVD<Matrix> svd(block);
    for (Eigen::Index x = 0; x < svd.singularValues().size(); ++x) values.push_back(svd.singularValues()(x));
  }
  values.resize(static_cast<std::size_t>(std::min(m, n)), 0.0);
  std::sort(values.begin(), values.end(), std::greater<>());
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

Vector singular_values(const Matrix& a) {
  if (!a.allFinite()) {
    throw InvalidInput("singular_values: non-finite entries");
  }
  Vector s = blockwise_singular_values(a);
  std::sort(s.data(), s.data() + s.size());
  return s;
}

double operator_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return blockwise_singular_values(a)(0);
}

bool is_contractive_invertible(const Matrix& a, const LinalgTolerances& tol) {
  if (a.rows() != a.cols() || !a.allFinite()) return false;
  return operator_norm(a) < 1.0 && std::abs(a.determinant()) > tol.det;
}

// ---------------------------------------------------------------- frames

SubspaceFrame SubspaceFrame::from_orthonormal(Matrix frame, const LinalgTolerances& tol) {
  const auto d = frame.rows();
  const auto k = frame.cols();
  if (k < 1 || k > d) {
    throw InvalidInput("frame must have 1 <= k <= d columns");
  }
  if (!frame.allFinite()) {
    throw InvalidInput("frame has non-finite entries");
  }
  const Matrix gram = frame.transpose() * frame - Matrix::Identity(k, k);
  if (gram.cwiseAbs().maxCoeff() > tol.orthonormality) {
    throw InvalidInput("frame columns are not orthonormal");
  }
  return SubspaceFrame(std::move(frame));
}

SubspaceFrame SubspaceFrame::from_spanning(const Matrix& columns) {
  if (columns.cols() < 1 || columns.cols() > columns.rows()) {
    throw InvalidInput("spanning set must have 1 <= k <= d columns");
  }
  if (!columns.allFinite()) {
    throw InvalidInput("spanning set has non-finite entries");
  }
  Eigen::JacobiSVD<Matrix> svd(columns, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  if (s(s.size() - 1) <= 1e-14 * std::max(1.0, s(0))) {
    throw InvalidInput("spanning set is rank deficient");
  }
  // Householder QR keeps span(first j columns) for every j, which matters
  // when callers rely on leading() of the result.
  return SubspaceFrame(orthonormalize(columns));
}

SubspaceFrame SubspaceFrame::whole_space(int d) {
  return SubspaceFrame(Matrix::Identity(d, d));
}

SubspaceFrame SubspaceFrame::coordinate(int d, std::span<const int> axes) {
  if (axes.empty()) throw InvalidInput("coordinate subspace needs at least one axis");
  Matrix f = Matrix::Zero(d, static_cast<Eigen::Index>(axes.size()));
  for (std::size_t j = 0; j < axes.size(); ++j) {
    if (axes[j] < 0 || axes[j] >= d) throw InvalidInput("coordinate axis out of range");
    f(axes[j], static_cast<Eigen::Index>(j)) = 1.0;
  }
  return from_orthonormal(std::move(f));
}

SubspaceFrame SubspaceFrame::leading(int k) const {
  if (k < 1 || k > dim()) throw InvalidInput("leading(k) with k out of range");
  return SubspaceFrame(frame_.leftCols(k));
}

SubspaceFrame SubspaceFrame::complement() const {
  const int d = ambient_dim();
  const int k = dim();
  if (k == d) throw InvalidInput("complement of the whole space is trivial");
  Eigen::JacobiSVD<Matrix> svd(frame_ * frame_.transpose(), Eigen::ComputeFullU);
  // Left singular vectors beyond the k-th span the kernel of the projector.
  return SubspaceFrame(svd.matrixU().rightCols(d - k));
}

SubspaceFrame SubspaceFrame::mapped(const Matrix& a) const {
  if (a.cols() != ambient_dim()) throw DimensionMismatch("mapped: matrix/frame dimension mismatch");
  return SubspaceFrame(orthonormalize(a * frame_));
}

std::vector<int> FlagChain::dims() const {
  std::vector<int> out;
  out.reserve(frames_.size());
  for (const auto& f : frames_) out.push_back(f.dim());
  return out;
}

FlagChain FlagChain::create(std::vector<SubspaceFrame> frames, const LinalgTolerances& tol) {
  if (frames.empty()) throw InvalidInput("flag must contain at least one subspace");
  const int d = frames.front().ambient_dim();
  for (std::size_t k = 0; k < frames.size(); ++k) {
    if (frames[k].ambient_dim() != d) throw DimensionMismatch("flag frames in different ambient spaces");
    if (k == 0) continue;
    if (frames[k].dim() >= frames[k - 1].dim()) {
      throw InvalidInput("flag dimensions must be strictly decreasing");
    }
    const Matrix& outer = frames[k - 1].frame();
    const Matrix& inner = frames[k].frame();
    const Matrix residual = inner - outer * (outer.transpose() * inner);
    if (residual.cwiseAbs().maxCoeff() > tol.nesting) {
      throw InvalidInput("flag subspaces are not nested");
    }
  }
  return FlagChain(d, std::move(frames));
}

// ---------------------------------------------------------------- norms

double restricted_norm(const Matrix& a, const SubspaceFrame& v) {
  if (a.cols() != v.ambient_dim()) {
    throw DimensionMismatch("restricted_norm: matrix is " + std::to_string(a.cols()) +
                            "-dimensional, subspace lives in R^" + std::to_string(v.ambient_dim()));
  }
  return operator_norm(a * v.frame());
}

double restricted_conorm(const Matrix& a, const SubspaceFrame& v) {
  require_square_finite(a);
  return 1.0 / restricted_norm(a.inverse(), v);
}

Vector orthogonal_projection(const SubspaceFrame& v, const Vector& x) {
  if (x.size() != v.ambient_dim()) {
    throw DimensionMismatch("orthogonal_projection: point/subspace dimension mismatch");
  }
  return v.frame().transpose() * x;
}

// ---------------------------------------------------------------- compounds

double minor(const Matrix& a, std::span<const int> rows, std::span<const int> cols) {
  const int d = static_cast<int>(a.rows());
  if (rows.size() != cols.size() || rows.empty()) {
    throw InvalidInput("minor: rows and cols must be non-empty and of equal length");
  }
  if (static_cast<int>(rows.size()) > std::min<int>(d, static_cast<int>(a.cols()))) {
    throw InvalidInput("minor: order exceeds matrix size");
  }
  require_increasing(rows, d, "minor row");
  require_increasing(cols, static_cast<int>(a.cols()), "minor column");
  const auto p = static_cast<Eigen::Index>(rows.size());
  Matrix sub(p, p);
  for (Eigen::Index r = 0; r < p; ++r) {
    for (Eigen::Index c = 0; c < p; ++c) {
      sub(r, c) = a(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)]);
    }
  }
  return sub.determinant();
}

std::vector<std::vector<int>> index_tuples(int d, int p) {
  std::vector<std::vector<int>> out;
  if (p < 1 || p > d) return out;
  std::vector<int> idx(static_cast<std::size_t>(p));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    out.push_back(idx);
    int k = p - 1;
    while (k >= 0 && idx[static_cast<std::size_t>(k)] == d - p + k) --k;
    if (k < 0) break;
    ++idx[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < p; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

Matrix exterior_power(const Matrix& a, int p) {
  require_square_finite(a, "exterior_power");
  const int d = static_cast<int>(a.rows());
  if (p < 1 || p > d) {
    throw InvalidInput("exterior_power: p must satisfy 1 <= p <= d");
  }
  if (p == 1) return a;
  const auto tuples = index_tuples(d, p);
  const auto n = static_cast<Eigen::Index>(tuples.size());
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(i, j) = minor(a, tuples[static_cast<std::size_t>(i)], tuples[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

// ---------------------------------------------------------------- angles

double principal_angle_distance(const SubspaceFrame& u, const SubspaceFrame& w) {
  require_same_ambient(u, w);
  if (u.dim() != w.dim()) {
    throw DimensionMismatch("principal_angle_distance needs equal subspace dimensions");
  }
  // ||(I - P_W) U||_2 = sin(theta_max) for equal dimensions.
  const Matrix residual = u.frame() - w.frame() * (w.frame().transpose() * u.frame());
  return std::min(1.0, operator_norm(residual));
}

double minimum_angle_sine(const SubspaceFrame& u, const SubspaceFrame& w) {
  require_same_ambient(u, w);
  const Matrix residual = u.frame() - w.frame() * (w.frame().transpose() * u.frame());
  if (u.dim() + w.dim() > u.ambient_dim()) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(residual);
  const Vector& s = svd.singularValues();
  return std::min(1.0, s(s.size() - 1));
}

std::optional<SubspaceFrame> subspace_intersection(const SubspaceFrame& u, const SubspaceFrame& w,
                                                   double tol) {
  require_same_ambient(u, w);
  // Principal vectors of U with respect to W: right singular vectors of the
  // residual (I - P_W) U with the smallest singular values (the angle sines).
  const Matrix residual = u.frame() - w.frame() * (w.frame().transpose() * u.frame());
  Eigen::JacobiSVD<Matrix> svd(residual, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const Matrix& v = svd.matrixV();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    const double sine = j < s.size() ? s(j) : 0.0;
    if (sine < tol) keep.push_back(j);
  }
  if (keep.empty()) return std::nullopt;
  Matrix basis(u.ambient_dim(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    basis.col(static_cast<Eigen::Index>(c)) = u.frame() * v.col(keep[c]);
  }
  return SubspaceFrame::from_spanning(basis);
}

Matrix orthonormalize(const Matrix& m, Vector* log_diag) {
  Eigen::HouseholderQR<Matrix> qr(m);
  const auto rows = m.rows();
  const auto cols = m.cols();
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  const Matrix& r = qr.matrixQR();
  if (log_diag != nullptr) log_diag->resize(cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double rjj = r(j, j);
    if (rjj < 0) q.col(j) = -q.col(j);
    if (log_diag != nullptr) (*log_diag)(j) = std::log(std::abs(rjj));
  }
  return q;
}

}  // namespace affdim
