#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace affdim {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr int kMaxDimension = 8;

/// Numerical tolerances shared by the linear-algebra layer.
struct LinalgTolerances {
  double det = 1e-12;             // |det A| threshold for "invertible"
  double orthonormality = 1e-10;  // ||F^T F - I||_max for frames
  double intersection = 1e-6;     // principal-angle sine counted as zero
  double nesting = 1e-8;          // containment residual in flags
};

/// Throws InvalidInput if the dimension is outside [1, kMaxDimension] or the
/// matrix is not square with finite entries.
void require_square_finite(const Matrix& a, const char* what = "matrix");

/// True when every singular value is < 1 and |det| > tol.det.
bool is_contractive_invertible(const Matrix& a, const LinalgTolerances& tol = {});

/// Singular values sorted ascending: alpha_d <= ... <= alpha_1.
Vector singular_values(const Matrix& a);

/// alpha_1(A), the operator norm.
double operator_norm(const Matrix& a);

/// Orthonormal basis of a k-dimensional subspace of R^d, stored as a d x k
/// matrix.  Equality of subspaces is decided with principal angles, never by
/// comparing frames entrywise.
class SubspaceFrame {
 public:
  /// Validates orthonormality of the columns.
  static SubspaceFrame from_orthonormal(Matrix frame, const LinalgTolerances& tol = {});
  /// Orthonormalises arbitrary spanning columns (must have full column rank).
  static SubspaceFrame from_spanning(const Matrix& columns);
  static SubspaceFrame whole_space(int d);
  /// span(e_i) for the listed 0-based coordinate indices.
  static SubspaceFrame coordinate(int d, std::span<const int> axes);

  int ambient_dim() const noexcept { return static_cast<int>(frame_.rows()); }
  int dim() const noexcept { return static_cast<int>(frame_.cols()); }
  const Matrix& frame() const noexcept { return frame_; }

  /// First k columns; a subspace of this one.
  SubspaceFrame leading(int k) const;
  /// Orthogonal complement in R^d (dimension d - k, must be positive).
  SubspaceFrame complement() const;
  /// Image under an invertible linear map.
  SubspaceFrame mapped(const Matrix& a) const;
  /// Orthogonal projector F F^T.
  Matrix projector() const { return frame_ * frame_.transpose(); }

 private:
  explicit SubspaceFrame(Matrix frame) : frame_(std::move(frame)) {}
  Matrix frame_;
};

/// Nested subspaces with strictly decreasing dimensions; frames()[k+1] lies
/// inside frames()[k].
class FlagChain {
 public:
  static FlagChain create(std::vector<SubspaceFrame> frames, const LinalgTolerances& tol = {});

  int ambient_dim() const noexcept { return d_; }
  std::vector<int> dims() const;
  const std::vector<SubspaceFrame>& frames() const noexcept { return frames_; }
  std::size_t size() const noexcept { return frames_.size(); }
  const SubspaceFrame& operator[](std::size_t k) const { return frames_[k]; }

 private:
  FlagChain(int d, std::vector<SubspaceFrame> frames) : d_(d), frames_(std::move(frames)) {}
  int d_;
  std::vector<SubspaceFrame> frames_;
};

/// ||A|V|| = sup over v in V of |Av|/|v|.
double restricted_norm(const Matrix& a, const SubspaceFrame& v);

/// m(A|V) = ||A^{-1}|V||^{-1}.
double restricted_conorm(const Matrix& a, const SubspaceFrame& v);

/// Coordinates of x in the orthonormal frame of V (a k-vector).
Vector orthogonal_projection(const SubspaceFrame& v, const Vector& x);

/// Determinant of the submatrix A[rows, cols]; indices are 0-based and must be
/// strictly increasing with equal lengths.
double minor(const Matrix& a, std::span<const int> rows, std::span<const int> cols);

/// All strictly increasing p-tuples of {0,...,d-1} in lexicographic order.
std::vector<std::vector<int>> index_tuples(int d, int p);

/// p-th compound matrix, entry (I, J) = minor(A, I, J), in the lexicographic
/// basis e_I of the p-th exterior power.
Matrix exterior_power(const Matrix& a, int p);

/// Sine of the largest principal angle between equal-dimensional subspaces.
double principal_angle_distance(const SubspaceFrame& u, const SubspaceFrame& w);

/// Sine of the smallest angle between a nonzero vector of U and one of W.
/// Zero iff the subspaces intersect nontrivially.
double minimum_angle_sine(const SubspaceFrame& u, const SubspaceFrame& w);

/// Numerical intersection: principal vectors whose angle sine is below tol.
/// Returns nullopt for a trivial intersection.
std::optional<SubspaceFrame> subspace_intersection(const SubspaceFrame& u, const SubspaceFrame& w,
                                                   double tol = LinalgTolerances{}.intersection);

/// Householder QR of `m` with R's diagonal made nonnegative.  Returns the
/// orthonormal factor and writes log|R_jj| into `log_diag`.
Matrix orthonormalize(const Matrix& m, Vector* log_diag = nullptr);

}  // namespace affdim
