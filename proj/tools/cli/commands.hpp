#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"

namespace affdim::cli {

enum ExitCode : int { kSuccess = 0, kValidationFailure = 1, kUsageError = 2 };

/// Command-line flags shared by the subcommands.
struct CommandOptions {
  std::optional<std::string> csv;
  std::optional<std::string> histogram;
  std::optional<std::string> cloud;
  bool deterministic = false;
  bool assume_ssc = false;
};

struct CommandResult {
  /// The "results" member of the report.
  nlohmann::json results;
  std::vector<std::string> warnings;
  int exit_code = kSuccess;
  /// Human-readable table (validate only).
  std::string table;
};

/// Raised for requests the tool refuses (exit code 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

CommandResult cmd_lyapunov(const RunConfig& config, const CommandOptions& options);
CommandResult cmd_domination(const RunConfig& config, const CommandOptions& options);
CommandResult cmd_dim(const RunConfig& config, const CommandOptions& options);
CommandResult cmd_validate(const RunConfig& config, const CommandOptions& options);

/// Full report document: schema version, command, resolved config, results,
/// warnings, and a timestamp unless deterministic.
nlohmann::json make_report(const std::string& command, const RunConfig& config, const CommandResult& result,
                           bool deterministic);

/// Parses argv, runs the subcommand and writes the report.  Returns the exit code.
int run(int argc, const char* const* argv);

}  // namespace affdim::cli
