#include <gtest/gtest.h>

#include "affdim/dimension.hpp"
#include "affdim/errors.hpp"
#include "affdim/measure.hpp"
#include "oracles.hpp"

namespace {

using affdim::Matrix;
using affdim::SeparationStatus;
using fixtures::vec;

TEST(AttractorBox, ContainsSampledPoints) {
  const auto ifs = fixtures::bm_carpet();
  const auto box = affdim::attractor_box(ifs);
  EXPECT_NEAR(box.lower(0), 0.0, 1e-9);
  EXPECT_NEAR(box.upper(0), 1.0, 1e-9);
  EXPECT_NEAR(box.upper(1), 1.0, 1e-9);
  const auto cloud = affdim::sample_measure(ifs, 2000, 20, affdim::Rng(1));
  for (Eigen::Index k = 0; k < cloud.points.cols(); ++k) EXPECT_TRUE(box.contains(cloud.points.col(k)));
}

TEST(Separation, CantorIsStronglySeparated) {
  const auto v = affdim::check_separation(fixtures::cantor(), 6);
  EXPECT_EQ(v.status, SeparationStatus::ssc_verified);
  EXPECT_NEAR(v.gap, 1.0 / 3.0, 1e-9);
  EXPECT_TRUE(v.sosc_verified);
}

// Cylinders of the carpet touch along an edge: the strong separation check
// cannot succeed, the open set certificate does.
TEST(Separation, CarpetTouchesButSatisfiesOpenSetCondition) {
  const auto v = affdim::check_separation(fixtures::bm_carpet(), 6);
  EXPECT_EQ(v.status, SeparationStatus::inconclusive);
  EXPECT_TRUE(v.sosc_verified) << v.sosc_detail;
}

TEST(Separation, CoincidingCylindersAreOverlap) {
  Matrix a(2, 2);
  a << 0.6180339887498949, 0.0, 0.0, 0.4;
  const affdim::IfsSystem ifs({{a, vec({0, 0})}, {a, vec({1, 0})}, {a, vec({0, 1})}},
                              affdim::BernoulliWeights::uniform(3));
  const auto v = affdim::check_separation(ifs, 8);
  ASSERT_EQ(v.status, SeparationStatus::overlap_detected);
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_NE(v.witness->first[0], v.witness->second[0]);
  // The witness words give the same affine map.
  const affdim::SymbolWord& u = v.witness->first;
  const affdim::SymbolWord& w = v.witness->second;
  affdim::Vector x = affdim::Vector::Zero(2), y = affdim::Vector::Zero(2);
  for (std::size_t k = u.size(); k-- > 0;) x = ifs[u[k]](x);
  for (std::size_t k = w.size(); k-- > 0;) y = ifs[w[k]](y);
  EXPECT_LT((x - y).norm(), 1e-9);
  EXPECT_FALSE(v.sosc_verified);
}

TEST(Separation, IdenticalMapsOverlapAtLevelOne) {
  Matrix a(1, 1);
  a(0, 0) = 0.3;
  const affdim::IfsSystem ifs({{a, vec({0.0})}, {a, vec({0.0})}}, affdim::BernoulliWeights::uniform(2));
  const auto v = affdim::check_separation(ifs, 4);
  EXPECT_EQ(v.status, SeparationStatus::overlap_detected);
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_EQ(v.witness->first.size(), 1U);
}

// The budget caps refinement: touching cylinders keep splitting until it runs out.
TEST(Separation, PairBudgetStopsRefinement) {
  affdim::SeparationOptions o;
  o.pair_budget = 100;
  const auto v = affdim::check_separation(fixtures::bm_carpet(), 10, o);
  EXPECT_EQ(v.status, SeparationStatus::inconclusive);
  EXPECT_NE(v.detail.find("budget"), std::string::npos) << v.detail;
  EXPECT_LE(v.pairs_examined, 100U);
}

TEST(Separation, ToString) {
  EXPECT_EQ(affdim::to_string(SeparationStatus::ssc_verified), "ssc-verified");
  EXPECT_EQ(affdim::to_string(SeparationStatus::overlap_detected), "overlap-detected");
  EXPECT_EQ(affdim::to_string(SeparationStatus::inconclusive), "inconclusive");
}

}  // namespace
