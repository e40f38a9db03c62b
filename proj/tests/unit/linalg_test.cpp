#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "affdim/errors.hpp"
#include "affdim/linalg.hpp"
#include "oracles.hpp"

namespace {

using affdim::FlagChain;
using affdim::Matrix;
using affdim::SubspaceFrame;
using affdim::Vector;
using fixtures::vec;

Matrix m2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

SubspaceFrame line(std::initializer_list<double> v) {
  Matrix f(static_cast<Eigen::Index>(v.size()), 1);
  f.col(0) = vec(v);
  return SubspaceFrame::from_spanning(f);
}

TEST(SingularValues, DiagonalAndIdentity) {
  const Vector s = affdim::singular_values(oracle::diag2(0.5, 0.25));
  EXPECT_DOUBLE_EQ(s(0), 0.25);
  EXPECT_DOUBLE_EQ(s(1), 0.5);
  const Vector id = affdim::singular_values(Matrix::Identity(3, 3));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(id(i), 1.0, 1e-15);
}

TEST(SingularValues, MatchEigenSolveOfGram) {
  const Matrix a = m2(0.3, 0.1, 0.0, 0.2);
  const Vector s = affdim::singular_values(a);
  const auto ref = oracle::singular_values(a);
  EXPECT_NEAR(s(0), ref[0], 1e-14);
  EXPECT_NEAR(s(1), ref[1], 1e-14);
}

TEST(SingularValues, RejectsNonFinite) {
  Matrix a = Matrix::Identity(2, 2);
  a(0, 1) = std::nan("");
  EXPECT_THROW(affdim::singular_values(a), affdim::InvalidInput);
}

TEST(SingularValues, ProductIsAbsDeterminant) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + trial % 5;
    const Matrix a = oracle::random_contraction(gen, d, 0.9, 1e4);
    const Vector s = affdim::singular_values(a);
    EXPECT_NEAR(s.prod() / std::abs(oracle::leibniz_det(a)), 1.0, 1e-10);
    EXPECT_TRUE(std::is_sorted(s.data(), s.data() + s.size()));
  }
}

// Blocks hidden by a permutation are decomposed separately; a 1 x 1 block
// returns its entry exactly.
TEST(SingularValues, BlockStructureIsExact) {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix b = oracle::random_contraction(gen, 2, 0.8);
    const double rho = 0.1 + 0.001 * trial;
    Matrix a = Matrix::Zero(3, 3);
    // rows/cols {0, 2} carry b, index 1 carries rho
    a(0, 0) = b(0, 0);
    a(0, 2) = b(0, 1);
    a(2, 0) = b(1, 0);
    a(2, 2) = b(1, 1);
    a(1, 1) = -rho;
    const Vector s = affdim::singular_values(a);
    const auto ref = oracle::singular_values(b);
    std::vector<double> expected{ref[0], ref[1], rho};
    std::sort(expected.begin(), expected.end());
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(s(i), expected[static_cast<std::size_t>(i)], 1e-14);
    EXPECT_TRUE(s(0) == rho || s(1) == rho || s(2) == rho);
  }
}

TEST(SingularValues, RectangularAndZero) {
  Matrix a = Matrix::Zero(2, 3);
  a(1, 2) = -2.0;
  const Vector s = affdim::singular_values(a);
  ASSERT_EQ(s.size(), 2);
  EXPECT_EQ(s(0), 0.0);
  EXPECT_EQ(s(1), 2.0);
  EXPECT_EQ(affdim::operator_norm(a), 2.0);
  EXPECT_EQ(affdim::operator_norm(Matrix::Zero(2, 2)), 0.0);
}

TEST(Dimension, RejectsOversizedAndNonSquare) {
  EXPECT_THROW(affdim::require_square_finite(Matrix::Identity(9, 9)), affdim::InvalidInput);
  EXPECT_THROW(affdim::require_square_finite(Matrix::Zero(2, 3)), affdim::InvalidInput);
  EXPECT_NO_THROW(affdim::require_square_finite(Matrix::Identity(8, 8)));
}

TEST(Contractive, Classification) {
  EXPECT_TRUE(affdim::is_contractive_invertible(oracle::diag2(0.5, 0.25)));
  EXPECT_FALSE(affdim::is_contractive_invertible(oracle::diag2(1.0, 0.25)));
  EXPECT_FALSE(affdim::is_contractive_invertible(oracle::diag2(0.5, 0.0)));
}

TEST(RestrictedNorm, Examples) {
  const Matrix d = oracle::diag2(0.5, 0.25);
  EXPECT_DOUBLE_EQ(affdim::restricted_norm(d, line({1, 0})), 0.5);

  const Matrix a = m2(0.3, 0.1, 0.0, 0.2);
  EXPECT_NEAR(affdim::restricted_norm(a, SubspaceFrame::whole_space(2)), affdim::operator_norm(a), 1e-15);
  const Vector v = vec({1.0, 1.0});
  EXPECT_NEAR(affdim::restricted_norm(a, line({1, 1})), (a * v).norm() / std::sqrt(2.0), 1e-15);
}

TEST(RestrictedNorm, WholeSpaceGivesExtremeSingularValues) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 4;
    const Matrix a = oracle::random_contraction(gen, d, 0.8);
    const auto ref = oracle::singular_values(a);
    const auto whole = SubspaceFrame::whole_space(d);
    EXPECT_NEAR(affdim::restricted_norm(a, whole), ref.back(), 1e-12);
    EXPECT_NEAR(affdim::restricted_conorm(a, whole), ref.front(), 1e-12);
  }
}

TEST(RestrictedNorm, DimensionMismatch) {
  EXPECT_THROW(affdim::restricted_norm(Matrix::Identity(3, 3), line({1, 0})), affdim::DimensionMismatch);
}

TEST(OrthogonalProjection, Examples) {
  const int axis = 1;
  const auto e2 = SubspaceFrame::coordinate(2, std::span<const int>(&axis, 1));
  EXPECT_DOUBLE_EQ(affdim::orthogonal_projection(e2, vec({3, 4}))(0), 4.0);
  EXPECT_NEAR(affdim::orthogonal_projection(line({1, 1}), vec({1, 0}))(0), 1.0 / std::sqrt(2.0), 1e-15);

  const Vector x = vec({0.3, -2.0, 5.0});
  EXPECT_NEAR(affdim::orthogonal_projection(SubspaceFrame::whole_space(3), x).norm(), x.norm(), 1e-14);
  EXPECT_THROW(affdim::orthogonal_projection(e2, x), affdim::DimensionMismatch);
}

TEST(OrthogonalProjection, ReembeddingIsIdempotent) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> g;
  Matrix cols(4, 2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) cols(i, j) = g(gen);
  const auto v = SubspaceFrame::from_spanning(cols);
  Vector x(4);
  for (int i = 0; i < 4; ++i) x(i) = g(gen);
  const Vector once = v.frame() * affdim::orthogonal_projection(v, x);
  const Vector twice = v.frame() * affdim::orthogonal_projection(v, once);
  EXPECT_LT((once - twice).norm(), 1e-14);
}

TEST(Minor, Examples) {
  const Matrix a = m2(0.3, 0.1, 0.05, 0.2);
  const std::vector<int> both{0, 1};
  EXPECT_NEAR(affdim::minor(a, both, both), a.determinant(), 1e-16);
  for (int i = 0; i < 2; ++i) {
    const std::vector<int> one{i};
    EXPECT_DOUBLE_EQ(affdim::minor(a, one, one), a(i, i));
  }
  Matrix pascal(3, 3);
  pascal << 1, 1, 1, 1, 2, 3, 1, 3, 6;
  EXPECT_NEAR(affdim::minor(pascal, std::vector<int>{0, 1}, std::vector<int>{1, 2}), 1.0, 1e-14);
}

TEST(Minor, RejectsBadIndices) {
  const Matrix a = Matrix::Identity(3, 3);
  EXPECT_THROW(affdim::minor(a, std::vector<int>{1, 0}, std::vector<int>{0, 1}), affdim::InvalidInput);
  EXPECT_THROW(affdim::minor(a, std::vector<int>{0, 3}, std::vector<int>{0, 1}), affdim::InvalidInput);
  EXPECT_THROW(affdim::minor(a, std::vector<int>{0}, std::vector<int>{0, 1}), affdim::InvalidInput);
}

TEST(Minor, AgreesWithLeibniz) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 4;
    const Matrix a = oracle::random_contraction(gen, d, 0.9, 1e3);
    for (int p = 1; p <= d; ++p)
      for (const auto& r : oracle::subsets(d, p))
        for (const auto& c : oracle::subsets(d, p)) EXPECT_NEAR(affdim::minor(a, r, c), oracle::minor_of(a, r, c), 1e-13);
  }
}

TEST(ExteriorPower, Examples) {
  const Matrix a = m2(0.3, 0.1, 0.05, 0.2);
  EXPECT_LT((affdim::exterior_power(a, 1) - a).norm(), 1e-16);
  const Matrix top = affdim::exterior_power(a, 2);
  ASSERT_EQ(top.rows(), 1);
  EXPECT_NEAR(top(0, 0), a.determinant(), 1e-16);

  Matrix d3 = Matrix::Zero(3, 3);
  d3.diagonal() = vec({2, 3, 5});
  const Matrix e = affdim::exterior_power(d3, 2);
  Matrix expected = Matrix::Zero(3, 3);
  expected.diagonal() = vec({6, 10, 15});
  EXPECT_LT((e - expected).norm(), 1e-14);
  EXPECT_THROW(affdim::exterior_power(d3, 0), affdim::InvalidInput);
  EXPECT_THROW(affdim::exterior_power(d3, 4), affdim::InvalidInput);
}

TEST(ExteriorPower, LexicographicBasisMatchesOracle) {
  std::mt19937_64 gen(21);
  const Matrix a = oracle::random_contraction(gen, 4, 0.9);
  for (int p = 1; p <= 4; ++p) EXPECT_LT((affdim::exterior_power(a, p) - oracle::compound(a, p)).norm(), 1e-13);
  EXPECT_EQ(affdim::index_tuples(4, 2), oracle::subsets(4, 2));
}

TEST(ExteriorPower, MultiplicativeAndNormIsProductOfSingularValues) {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 4;
    const Matrix a = oracle::random_contraction(gen, d, 0.9, 1e3);
    const Matrix b = oracle::random_contraction(gen, d, 0.9, 1e3);
    const auto sv = oracle::singular_values(a);
    for (int p = 1; p <= d; ++p) {
      const Matrix lhs = affdim::exterior_power(a * b, p);
      const Matrix rhs = affdim::exterior_power(a, p) * affdim::exterior_power(b, p);
      EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, rhs.cwiseAbs().maxCoeff()));
      double prod = 1.0;
      for (int i = 0; i < p; ++i) prod *= sv[sv.size() - 1 - static_cast<std::size_t>(i)];
      EXPECT_NEAR(affdim::operator_norm(affdim::exterior_power(a, p)) / prod, 1.0, 1e-8);
    }
  }
}

TEST(PrincipalAngle, Examples) {
  const auto e1 = line({1, 0});
  EXPECT_NEAR(affdim::principal_angle_distance(e1, e1), 0.0, 1e-15);
  EXPECT_NEAR(affdim::principal_angle_distance(e1, line({0, 1})), 1.0, 1e-15);
  EXPECT_NEAR(affdim::principal_angle_distance(e1, line({1, 1})), std::sin(std::numbers::pi / 4), 1e-15);
  EXPECT_THROW(affdim::principal_angle_distance(e1, SubspaceFrame::whole_space(2)), affdim::DimensionMismatch);
}

TEST(PrincipalAngle, InvariantUnderFrameRotationAndSymmetric) {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    Matrix a(5, 2), b(5, 2);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 2; ++j) {
        a(i, j) = g(gen);
        b(i, j) = g(gen);
      }
    const auto u = SubspaceFrame::from_spanning(a);
    const auto w = SubspaceFrame::from_spanning(b);
    const Matrix q = oracle::rotation(g(gen));
    const auto u_rot = SubspaceFrame::from_orthonormal(u.frame() * q);
    const double base = affdim::principal_angle_distance(u, w);
    EXPECT_NEAR(affdim::principal_angle_distance(u_rot, w), base, 1e-12);
    EXPECT_NEAR(affdim::principal_angle_distance(w, u), base, 1e-12);
    EXPECT_NEAR(affdim::principal_angle_distance(u, u_rot), 0.0, 1e-7);
  }
}

TEST(Intersection, CoordinatePlanes) {
  const std::vector<int> a{0, 1}, b{1, 2};
  const auto u = SubspaceFrame::coordinate(3, a);
  const auto w = SubspaceFrame::coordinate(3, b);
  const auto i = affdim::subspace_intersection(u, w);
  ASSERT_TRUE(i.has_value());
  ASSERT_EQ(i->dim(), 1);
  EXPECT_NEAR(affdim::principal_angle_distance(*i, line({0, 1, 0})), 0.0, 1e-12);

  const auto self = affdim::subspace_intersection(u, u);
  ASSERT_TRUE(self.has_value());
  EXPECT_EQ(self->dim(), 2);
  EXPECT_FALSE(affdim::subspace_intersection(line({1, 0, 0}), line({0, 0, 1})).has_value());
}

TEST(Intersection, RandomPlanesMeetInNullSpaceLine) {
  std::mt19937_64 gen(23);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    Matrix a(3, 2), b(3, 2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 2; ++j) {
        a(i, j) = g(gen);
        b(i, j) = g(gen);
      }
    // x = a u = b v  <=>  [a, -b] (u, v) = 0
    Matrix system(3, 4);
    system << a, -b;
    Eigen::FullPivLU<Matrix> lu(system);
    const Matrix kernel = lu.kernel();
    ASSERT_EQ(kernel.cols(), 1);
    Matrix direction(3, 1);
    direction.col(0) = a * kernel.col(0).head(2);
    const auto i = affdim::subspace_intersection(SubspaceFrame::from_spanning(a), SubspaceFrame::from_spanning(b));
    ASSERT_TRUE(i.has_value());
    ASSERT_EQ(i->dim(), 1);
    EXPECT_LT(affdim::principal_angle_distance(*i, SubspaceFrame::from_spanning(direction)), 1e-8);
  }
}

TEST(MinimumAngle, ZeroIffIntersecting) {
  const std::vector<int> a{0, 1}, b{1, 2};
  EXPECT_NEAR(affdim::minimum_angle_sine(SubspaceFrame::coordinate(3, a), SubspaceFrame::coordinate(3, b)), 0.0,
              1e-12);
  EXPECT_NEAR(affdim::minimum_angle_sine(line({1, 0}), line({1, 1})), std::sin(std::numbers::pi / 4), 1e-14);
}

TEST(Frames, OrthonormalityEnforced) {
  Matrix bad(2, 1);
  bad << 1.0, 1.0;
  EXPECT_THROW(SubspaceFrame::from_orthonormal(bad), affdim::InvalidInput);
  const auto complement = line({1, 1}).complement();
  EXPECT_EQ(complement.dim(), 1);
  EXPECT_NEAR(std::abs(complement.frame().col(0).dot(vec({1, 1}))), 0.0, 1e-14);
  EXPECT_THROW(SubspaceFrame::whole_space(2).complement(), affdim::InvalidInput);
}

TEST(Frames, MappedSubspace) {
  const auto mapped = line({1, 1}).mapped(oracle::diag2(2.0, 1.0));
  EXPECT_LT(affdim::principal_angle_distance(mapped, line({2, 1})), 1e-14);
}

TEST(Flags, NestingIsChecked) {
  const std::vector<int> a{0, 1}, b{0}, c{2};
  EXPECT_NO_THROW(FlagChain::create({SubspaceFrame::coordinate(3, a), SubspaceFrame::coordinate(3, b)}));
  EXPECT_THROW(FlagChain::create({SubspaceFrame::coordinate(3, a), SubspaceFrame::coordinate(3, c)}),
               affdim::InvalidInput);
  EXPECT_THROW(FlagChain::create({SubspaceFrame::coordinate(3, b), SubspaceFrame::coordinate(3, a)}),
               affdim::InvalidInput);
  const auto flag = FlagChain::create({SubspaceFrame::coordinate(3, a), SubspaceFrame::coordinate(3, b)});
  EXPECT_EQ(flag.dims(), (std::vector<int>{2, 1}));
}

}  // namespace
