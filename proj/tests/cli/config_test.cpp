#include <gtest/gtest.h>

#include "config.hpp"

namespace {

using affdim::cli::ConfigError;
using affdim::cli::parse_config;
using nlohmann::json;

json cantor_doc() {
  return json::parse(R"({
    "ifs": {
      "maps": [
        {"matrix": [[0.3333333333333333]], "translation": [0.0]},
        {"matrix": [[0.3333333333333333]], "translation": [0.6666666666666666]}
      ],
      "weights": [0.5, 0.5]
    },
    "seed": 3
  })");
}

TEST(Config, ParsesMapsAndDefaults) {
  const auto c = parse_config(cantor_doc());
  ASSERT_EQ(c.maps.size(), 2U);
  EXPECT_EQ(c.seed, 3U);
  EXPECT_EQ(c.lyapunov.steps, 10000U);
  EXPECT_EQ(c.domination.n_max, 12U);
  EXPECT_FALSE(c.validate.has_value());
  EXPECT_EQ(c.ifs().dim(), 1);
}

TEST(Config, FlatRowMajorMatrix) {
  auto doc = cantor_doc();
  doc["ifs"]["maps"] = json::parse(R"([{"matrix": [0.5, 0.1, 0.0, 0.4], "translation": [0, 0]}])");
  doc["ifs"]["weights"] = {1.0};
  const auto c = parse_config(doc);
  EXPECT_EQ(c.maps[0].linear(0, 1), 0.1);
  EXPECT_EQ(c.maps[0].linear(1, 0), 0.0);
}

TEST(Config, CarpetShorthand) {
  const auto doc = json::parse(R"({"ifs": {"carpet": {"m": 3, "n": 2, "digits": [[0,0],[1,0],[2,1]]}}})");
  const auto c = parse_config(doc);
  ASSERT_TRUE(c.carpet.has_value());
  const auto ifs = c.ifs();
  EXPECT_EQ(ifs.size(), 3U);
  EXPECT_NEAR(ifs.weights()[0], 1.0 / 3.0, 1e-15);
}

TEST(Config, RejectsUnknownKeysWithPath) {
  auto doc = cantor_doc();
  doc["lyapunov"] = {{"stepz", 10}};
  try {
    parse_config(doc);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("lyapunov.stepz"), std::string::npos) << e.what();
  }
  auto top = cantor_doc();
  top["extra"] = 1;
  EXPECT_THROW(parse_config(top), ConfigError);
}

TEST(Config, RejectsBadValues) {
  auto weights = cantor_doc();
  weights["ifs"]["weights"] = {0.5};
  EXPECT_THROW(parse_config(weights), ConfigError);
  auto version = cantor_doc();
  version["schema_version"] = 2;
  EXPECT_THROW(parse_config(version), ConfigError);
  auto ratio = cantor_doc();
  ratio["measure"] = {{"ratio", 1.5}};
  EXPECT_THROW(parse_config(ratio), ConfigError);
  auto both = cantor_doc();
  both["ifs"]["carpet"] = {{"m", 3}, {"n", 2}, {"digits", json::array()}};
  EXPECT_THROW(parse_config(both), ConfigError);
  auto negative_h = cantor_doc();
  negative_h["dimension"] = {{"H", -1.0}};
  EXPECT_THROW(parse_config(negative_h), ConfigError);
}

TEST(Config, ExpandingMapIsConfigError) {
  auto doc = cantor_doc();
  doc["ifs"]["maps"][0]["matrix"] = {{1.5}};
  const auto c = parse_config(doc);
  EXPECT_THROW(c.ifs(), ConfigError);
}

TEST(Config, ResolvedRoundTrips) {
  auto doc = cantor_doc();
  doc["lyapunov"] = {{"steps", 1234}};
  doc["measure"] = {{"samples", 777}, {"centers", 33}};
  doc["dimension"] = {{"H", 0.25}};
  const auto c = parse_config(doc);
  const auto resolved = c.resolved();
  const auto again = parse_config(resolved);
  EXPECT_EQ(again.resolved(), resolved);
  EXPECT_EQ(again.lyapunov.steps, 1234U);
  EXPECT_EQ(again.pipeline.samples, 777U);
  EXPECT_EQ(again.pipeline.local.centers, 33U);
  ASSERT_TRUE(again.pipeline.H.has_value());
  EXPECT_EQ(*again.pipeline.H, 0.25);
}

TEST(Config, ValidateCases) {
  const auto doc = json::parse(R"({"validate": {"cases": [
      {"name": "cantor", "self_similar": {"ratio": 0.3333333333333333, "translations": [[0], [0.6666666666666666]]}},
      {"name": "carpet", "carpet": {"m": 3, "n": 2, "digits": [[0,0],[1,0],[2,1]]}, "tolerance": 0.05}]}})");
  const auto c = parse_config(doc);
  ASSERT_TRUE(c.validate.has_value());
  ASSERT_EQ(c.validate->size(), 2U);
  EXPECT_EQ((*c.validate)[1].tolerance, 0.05);
  EXPECT_FALSE(c.has_ifs());
  EXPECT_THROW(c.ifs(), ConfigError);
  const auto ss = affdim::cli::self_similar_ifs(*(*c.validate)[0].self_similar);
  EXPECT_EQ(ss.size(), 2U);
}

TEST(Config, MissingFileNamesPath) {
  try {
    affdim::cli::load_config("/nonexistent/config.json");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/config.json"), std::string::npos);
  }
}

TEST(Config, ShippedConfigsParse) {
  for (const char* name : {"bm.json", "cantor.json", "stp.json", "conformal.json", "overlap.json"}) {
    const auto c = affdim::cli::load_config(std::string(AFFDIM_CONFIG_DIR) + "/" + name);
    EXPECT_NO_THROW(c.ifs()) << name;
  }
}

}  // namespace
