#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "affdim/dimension.hpp"
#include "affdim/errors.hpp"
#include "oracles.hpp"

namespace {

using affdim::Equivalence;

TEST(LyDimension, TwoDimensionalExample) {
  // h = 1, chi = (1, 2), D = {1}, proj = 0.5: 1/2 + (1/2)(1/2) = 0.75.
  affdim::DimensionInputs in{.h = 1.0, .H = 0.0, .chi = {1.0, 2.0}, .proj_dims = {{1, 0.5}}, .D = {1}};
  EXPECT_NEAR(affdim::ly_dimension(in), 0.75, 1e-15);
  in.H = 0.4;
  EXPECT_NEAR(affdim::ly_dimension(in), 0.3 + 0.25, 1e-15);
}

TEST(LyDimension, EmptyIndexSetIsEntropyOverTopExponent) {
  affdim::DimensionInputs in{.h = std::log(2.0), .H = 0.0, .chi = {std::log(3.0)}, .proj_dims = {}, .D = {}};
  EXPECT_NEAR(affdim::ly_dimension(in), std::log(2.0) / std::log(3.0), 1e-15);
}

TEST(LyDimension, RejectsMalformedInput) {
  affdim::DimensionInputs missing{.h = 1.0, .H = 0.0, .chi = {1.0, 2.0}, .proj_dims = {}, .D = {1}};
  EXPECT_THROW(affdim::ly_dimension(missing), affdim::InvalidInput);
  affdim::DimensionInputs descending{.h = 1.0, .H = 0.0, .chi = {2.0, 1.0}, .proj_dims = {}, .D = {}};
  EXPECT_THROW(affdim::ly_dimension(descending), affdim::InvalidInput);
  affdim::DimensionInputs out_of_range{.h = 1.0, .H = 0.0, .chi = {1.0, 2.0}, .proj_dims = {{2, 1.0}}, .D = {2}};
  EXPECT_THROW(affdim::ly_dimension(out_of_range), affdim::InvalidInput);
}

TEST(LyapunovDimension, MatchesBruteForce) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    const int d = 1 + trial % 4;
    std::vector<double> chi(static_cast<std::size_t>(d));
    for (auto& c : chi) c = u(gen);
    std::sort(chi.begin(), chi.end());
    double sum = 0.0;
    for (double c : chi) sum += c;
    const double h = std::uniform_real_distribution<double>(0.0, sum)(gen);
    const auto r = affdim::lyapunov_dimension(h, chi);
    EXPECT_NEAR(r.raw, oracle::lyapunov_dimension_bruteforce(h, chi), 1e-12);
    EXPECT_FALSE(r.clamped);
  }
}

TEST(LyapunovDimension, ClampsToAmbientDimension) {
  const std::vector<double> chi{0.5, 0.7};
  const auto r = affdim::lyapunov_dimension(5.0, chi);
  EXPECT_TRUE(r.clamped);
  EXPECT_EQ(r.value, 2.0);
  EXPECT_GT(r.raw, 2.0);
}

TEST(BedfordMcMullen, ClosedFormMatchesOracle) {
  const std::vector<affdim::CarpetDigit> digits{{0, 0}, {1, 0}, {2, 1}};
  const std::vector<double> p(3, 1.0 / 3.0);
  const auto bm = affdim::bedford_mcmullen_closed_form(digits, p, 3, 2);
  EXPECT_NEAR(bm.value, oracle::bedford_mcmullen({{0, 0}, {1, 0}, {2, 1}}, p, 3, 2), 1e-14);
  EXPECT_NEAR(bm.value, 1.33892, 5e-6);
  // The closed form is the formula with D = {1} and projection dim H(rows)/log n.
  affdim::DimensionInputs in{.h = bm.h, .H = 0.0, .chi = {bm.chi_1, bm.chi_2}, .proj_dims = {{1, bm.proj_dim}}, .D = {1}};
  EXPECT_NEAR(affdim::ly_dimension(in), bm.value, 1e-14);
}

TEST(BedfordMcMullen, RandomCarpetsAgreeWithFormula) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 3 + trial % 3, n = 2;
    std::vector<affdim::CarpetDigit> digits;
    std::vector<std::pair<int, int>> pairs;
    for (int c = 0; c < m; ++c) {
      const int row = static_cast<int>(gen() % 2);
      digits.push_back({c, row});
      pairs.emplace_back(c, row);
    }
    std::vector<double> p(digits.size());
    double s = 0;
    for (auto& x : p) s += (x = 0.1 + std::uniform_real_distribution<double>(0, 1)(gen));
    for (auto& x : p) x /= s;
    const auto bm = affdim::bedford_mcmullen_closed_form(digits, p, m, n);
    EXPECT_NEAR(bm.value, oracle::bedford_mcmullen(pairs, p, m, n), 1e-12);
    const auto ifs = affdim::bedford_mcmullen_ifs(digits, p, m, n);
    EXPECT_EQ(ifs.size(), digits.size());
  }
}

TEST(BedfordMcMullen, RejectsBadCarpets) {
  const std::vector<affdim::CarpetDigit> digits{{0, 0}, {3, 0}};
  const std::vector<double> p(2, 0.5);
  EXPECT_THROW(affdim::bedford_mcmullen_closed_form(digits, p, 3, 2), affdim::InvalidInput);
  const std::vector<affdim::CarpetDigit> ok{{0, 0}, {1, 1}};
  EXPECT_THROW(affdim::bedford_mcmullen_closed_form(ok, p, 2, 3), affdim::InvalidInput);
}

TEST(Equivalence, CarpetFailsBecauseProjectionIsTooSmall) {
  const std::vector<affdim::CarpetDigit> digits{{0, 0}, {1, 0}, {2, 1}};
  const std::vector<double> p(3, 1.0 / 3.0);
  const auto bm = affdim::bedford_mcmullen_closed_form(digits, p, 3, 2);
  const std::vector<double> chi{bm.chi_1, bm.chi_2};
  const auto ky = affdim::lyapunov_dimension(bm.h, chi);
  const std::vector<int> D{1};
  const auto e = affdim::kaplan_yorke_equivalence_check(bm.value, ky.value, 0.0, {{1, bm.proj_dim}}, D, 0.01);
  EXPECT_EQ(e.result, Equivalence::fails);
  EXPECT_FALSE(e.dimensions_equal);
  EXPECT_FALSE(e.conditions_hold);
}

TEST(Equivalence, HoldsWhenProjectionIsFull) {
  // chi = (1, 2), h = 2.5: KY = 1 + 1.5/2 = 1.75; formula with proj 1 is 1.25 + 0.5 = 1.75.
  const std::vector<int> D{1};
  const auto e = affdim::kaplan_yorke_equivalence_check(1.75, 1.75, 0.0, {{1, 1.0}}, D, 1e-9);
  EXPECT_EQ(e.result, Equivalence::holds);
}

TEST(Equivalence, DisagreementIsInconclusive) {
  const std::vector<int> D{1};
  const auto e = affdim::kaplan_yorke_equivalence_check(1.75, 1.75, 0.0, {{1, 0.5}}, D, 1e-9);
  EXPECT_EQ(e.result, Equivalence::inconclusive);
  EXPECT_NEAR(e.projection_residuals.at(1), 0.5, 1e-15);
}

TEST(Telescoping, MatchesOracleOnRandomSequences) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(trial % 5);
    std::vector<double> chi(d), hseq(d + 1, 0.0);
    for (auto& c : chi) c = u(gen);
    std::sort(chi.begin(), chi.end());
    for (std::size_t k = d; k-- > 0;) hseq[k] = hseq[k + 1] + u(gen);
    const auto r = affdim::telescoping_identity(hseq, chi);
    const auto [lhs, rhs] = oracle::telescoping_sides(hseq, chi);
    EXPECT_NEAR(r.lhs, lhs, 1e-12 * std::max(1.0, std::abs(lhs)));
    EXPECT_NEAR(r.rhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
    EXPECT_TRUE(r.holds);
  }
}

TEST(Telescoping, SmallExample) {
  const std::vector<double> hseq{1.0, 0.5, 0.0};
  const std::vector<double> chi{1.0, 2.0};
  const auto r = affdim::telescoping_identity(hseq, chi);
  EXPECT_NEAR(r.rhs, 0.5 + 0.25, 1e-15);
  EXPECT_TRUE(affdim::telescoping_identity_check(hseq, chi));
}

TEST(Provenance, ToString) {
  EXPECT_EQ(affdim::to_string(affdim::Provenance::closed_form), "closed-form");
  EXPECT_EQ(affdim::to_string(affdim::Equivalence::holds), "holds");
}

}  // namespace
