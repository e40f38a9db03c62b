#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "affdim/dimension.hpp"

namespace affdim::cli {

inline constexpr int kSchemaVersion = 1;

/// Malformed or unreadable configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CarpetSpec {
  int m = 0;
  int n = 0;
  std::vector<CarpetDigit> digits;
  std::vector<double> weights;
};

struct SelfSimilarSpec {
  double ratio = 0.0;
  std::vector<std::vector<double>> translations;
  std::vector<double> weights;
};

/// One row of the oracle suite run by `validate`.
struct ValidateCase {
  std::string name;
  std::optional<CarpetSpec> carpet;
  std::optional<SelfSimilarSpec> self_similar;
  double tolerance = 0.02;
};

struct DominationSettings {
  std::size_t n_max = 12;
  std::size_t budget = 1'000'000;
  double slope_epsilon = 0.01;
  double minor_epsilon = 1e-12;
};

struct RunConfig {
  /// Explicit maps (row-major) or the carpet shorthand; one of them for every
  /// command except validate.
  std::vector<AffineMap> maps;
  std::vector<double> weights;
  std::optional<CarpetSpec> carpet;
  std::uint64_t seed = 1;
  LyapunovOptions lyapunov{};
  DominationSettings domination{};
  PipelineConfig pipeline{};
  /// Absent: the default suite.  Present but empty is an error at run time.
  std::optional<std::vector<ValidateCase>> validate;

  bool has_ifs() const { return carpet.has_value() || !maps.empty(); }
  /// Throws ConfigError when the config has no IFS or it is invalid.
  IfsSystem ifs() const;
  /// Every setting with defaults filled in, in the input schema.
  nlohmann::json resolved() const;
};

RunConfig parse_config(const nlohmann::json& doc);
/// Reads and parses; a missing file raises ConfigError naming the path.
RunConfig load_config(const std::string& path);

IfsSystem carpet_ifs(const CarpetSpec& spec);
IfsSystem self_similar_ifs(const SelfSimilarSpec& spec);
std::vector<ValidateCase> default_validate_suite();

}  // namespace affdim::cli
