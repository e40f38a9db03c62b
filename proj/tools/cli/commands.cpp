#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "affdim/errors.hpp"
#include "report.hpp"

namespace affdim::cli {

using nlohmann::json;

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write to " + path);
  return out;
}

}  // namespace

CommandResult cmd_lyapunov(const RunConfig& config, const CommandOptions& options) {
  const IfsSystem ifs = config.ifs();
  CommandResult result;
  const auto spectrum = lyapunov_spectrum(ifs.linear_parts(), ifs.weights(), config.lyapunov, Rng(config.seed));
  if (config.lyapunov.trials < 2) {
    result.warnings.push_back("a single trial gives no standard errors; stderr fields are null");
  }
  const double det_rate = expected_log_det_rate(ifs.linear_parts(), ifs.weights());
  result.results = spectrum_json(spectrum);
  result.results["entropy"] = quantity(entropy(ifs.weights()), Provenance::closed_form);
  result.results["expected_log_det_rate"] = quantity(det_rate, Provenance::closed_form);
  const auto cons = conservation_check(spectrum, ifs.linear_parts(), ifs.weights());
  json conservation = {{"residual", quantity(cons.residual, Provenance::estimated)}};
  conservation["combined_stderr"] =
      cons.combined_error ? quantity(*cons.combined_error, Provenance::estimated) : json(nullptr);
  conservation["within_3_stderr"] = cons.holds ? json(*cons.holds) : json(nullptr);
  result.results["conservation"] = conservation;

  if (options.csv) {
    auto out = open_output(*options.csv);
    out << "trial";
    for (int p = 1; p <= spectrum.dim(); ++p) out << ",partial_sum_" << p;
    out << '\n';
    out << std::setprecision(17);
    for (std::size_t t = 0; t < spectrum.trial_partial_sums.size(); ++t) {
      out << t + 1;
      for (double v : spectrum.trial_partial_sums[t]) out << ',' << v;
      out << '\n';
    }
  }
  return result;
}

CommandResult cmd_domination(const RunConfig& config, const CommandOptions&) {
  const IfsSystem ifs = config.ifs();
  const auto& maps = ifs.linear_parts();
  const int d = ifs.dim();
  CommandResult result;

  json stp = json::array();
  bool all_stp = d >= 2;
  for (std::size_t k = 0; k < maps.size(); ++k) {
    const auto r = stp_details(maps[k], config.domination.minor_epsilon);
    all_stp = all_stp && r.strictly_totally_positive;
    stp.push_back({{"map", quantity(static_cast<double>(k + 1), Provenance::user_supplied)},
                   {"strictly_totally_positive", r.strictly_totally_positive},
                   {"determinant_positive", r.determinant_positive},
                   {"smallest_minor", quantity(r.smallest_minor, Provenance::closed_form)},
                   {"smallest_minor_order", quantity(r.smallest_minor_order, Provenance::closed_form)}});
  }
  json cones = json::array();
  for (int p = 1; p < d; ++p) {
    cones.push_back({{"p", quantity(p, Provenance::user_supplied)},
                     {"invariant", cone_invariance_check(maps, p, config.domination.minor_epsilon)}});
  }
  result.results["stp"] = stp;
  result.results["all_stp"] = all_stp;
  result.results["cone_invariance"] = cones;

  if (d < 2) {
    result.warnings.push_back("d = 1: there are no indices to test for domination");
    result.results["domination"] = nullptr;
    return result;
  }
  try {
    ScanOptions scan;
    scan.budget = config.domination.budget;
    const auto table = gap_ratio_scan(maps, config.domination.n_max, scan);
    const auto report = detect_domination(table, config.domination.slope_epsilon);
    result.results["domination"] = domination_json(report);
    json ratios = json::array();
    for (int i = 1; i < d; ++i) {
      json row = json::array();
      for (std::size_t n = 0; n <= table.n_max; ++n) {
        row.push_back(quantity(std::exp(table.max_log_ratio[n][static_cast<std::size_t>(i - 1)]), Provenance::estimated));
      }
      ratios.push_back({{"index", quantity(i, Provenance::estimated)}, {"max_ratio_by_length", row}});
    }
    result.results["scan"] = {{"exhaustive", table.exhaustive},
                              {"n_max", quantity(static_cast<double>(table.n_max), Provenance::user_supplied)},
                              {"ratios", ratios}};
    if (all_stp && !report.totally_dominated_splitting()) {
      result.warnings.push_back("all maps are strictly totally positive but the scan did not decide every index");
    }
  } catch (const BudgetExceeded& e) {
    result.warnings.push_back(e.what());
    json indices = json::array();
    for (int i = 1; i < d; ++i) {
      indices.push_back({{"index", quantity(i, Provenance::estimated)}, {"status", "inconclusive"}});
    }
    result.results["domination"] = {{"indices", indices},
                                    {"dominated_indices", json::array()},
                                    {"totally_dominated_splitting", false},
                                    {"exhaustive", false}};
    result.results["scan"] = nullptr;
  }
  return result;
}

CommandResult cmd_dim(const RunConfig& config, const CommandOptions& options) {
  const IfsSystem ifs = config.ifs();
  CommandResult result;
  if (options.assume_ssc) {
    const auto v = check_separation(ifs, config.pipeline.separation_level, config.pipeline.separation);
    if (v.status != SeparationStatus::ssc_verified && !v.sosc_verified) {
      throw UsageError("--assume-ssc refused: separation check returned " + to_string(v.status) +
                       " and the open set condition is not certified (" + v.detail + ")");
    }
  }
  PipelineConfig pc = config.pipeline;
  pc.keep_cloud = options.cloud.has_value();
  const auto report = full_pipeline(ifs, pc);
  result.results = dimension_report_json(report);
  if (!report.H) result.warnings.push_back("H unknown: the Ledrappier-Young value is conditional on H = 0 (pass --H)");
  if (report.routing == "formula-not-applicable") result.warnings.push_back("formula not applicable to this system");

  if (options.histogram) {
    auto out = open_output(*options.histogram);
    out << "series,sample,center,slope\n" << std::setprecision(17);
    for (std::size_t c = 0; c < report.empirical.slopes.size(); ++c) {
      out << "full,1," << c + 1 << ',' << report.empirical.slopes[c] << '\n';
    }
    for (const auto& [i, p] : report.projections) {
      for (std::size_t s = 0; s < p.sample_slopes.size(); ++s) {
        for (std::size_t c = 0; c < p.sample_slopes[s].size(); ++c) {
          out << "projection_" << i << ',' << s + 1 << ',' << c + 1 << ',' << p.sample_slopes[s][c] << '\n';
        }
      }
    }
  }
  if (options.cloud) {
    auto out = open_output(*options.cloud);
    write_cloud_csv(out, *report.cloud);
  }
  return result;
}

CommandResult cmd_validate(const RunConfig& config, const CommandOptions&) {
  const auto cases = config.validate.value_or(default_validate_suite());
  if (cases.empty()) throw ConfigError("$.validate.cases: the oracle suite is empty");
  CommandResult result;
  json rows = json::array();
  std::ostringstream table;
  table << std::left << std::setw(26) << "case" << std::setw(10) << "oracle" << std::setw(10) << "pipeline"
        << std::setw(10) << "|diff|" << std::setw(8) << "tol" << "result\n";
  bool all_pass = true;
  for (const auto& vc : cases) {
    double oracle = 0.0;
    std::optional<IfsSystem> ifs;
    if (vc.carpet) {
      ifs = carpet_ifs(*vc.carpet);
      oracle = bedford_mcmullen_closed_form(vc.carpet->digits, vc.carpet->weights, vc.carpet->m, vc.carpet->n).value;
    } else {
      ifs = self_similar_ifs(*vc.self_similar);
      oracle = entropy(ifs->weights()) / std::log(1.0 / vc.self_similar->ratio);
    }
    const auto report = full_pipeline(*ifs, config.pipeline);
    const std::optional<double> value = report.ly_dim;
    const double diff = value ? std::abs(*value - oracle) : std::nan("");
    const bool pass = value && diff <= vc.tolerance;
    all_pass = all_pass && pass;
    rows.push_back({{"name", vc.name},
                    {"oracle", quantity(oracle, Provenance::closed_form)},
                    {"pipeline", value ? quantity(*value, Provenance::estimated) : json(nullptr)},
                    {"abs_diff", value ? quantity(diff, Provenance::estimated) : json(nullptr)},
                    {"tolerance", quantity(vc.tolerance, Provenance::user_supplied)},
                    {"empirical_dim", quantity(report.empirical.median, Provenance::estimated)},
                    {"pass", pass}});
    const auto num = [&](double v) {
      std::ostringstream s;
      s << std::fixed << std::setprecision(4) << v;
      return s.str();
    };
    table << std::setw(26) << vc.name << std::setw(10) << num(oracle) << std::setw(10)
          << (value ? num(*value) : "n/a") << std::setw(10) << (value ? num(diff) : "n/a") << std::setw(8)
          << num(vc.tolerance) << (pass ? "PASS" : "FAIL") << '\n';
  }
  result.results = {{"cases", rows}, {"all_pass", all_pass}};
  result.table = table.str();
  result.exit_code = all_pass ? kSuccess : kValidationFailure;
  return result;
}

json make_report(const std::string& command, const RunConfig& config, const CommandResult& result,
                 bool deterministic) {
  json report;
  report["schema_version"] = kSchemaVersion;
  report["tool"] = "affine-dim 0.1.0";
  report["command"] = command;
  if (!deterministic) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream ts;
    ts << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    report["generated_at"] = ts.str();
  }
  report["config"] = {{"provenance", "user-supplied"}, {"resolved", config.resolved()}};
  report["results"] = result.results;
  report["warnings"] = result.warnings;
  return report;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Dimension theory numerics for self-affine measures", "affine-dim"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::string> out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<double> H;
  CommandOptions options;

  const auto common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", config_path, "JSON run configuration");
    if (config_required) opt->required();
    sub->add_option("--out", out_path, "write the JSON report here instead of stdout");
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_flag("--deterministic", options.deterministic, "omit the timestamp so reports are byte-identical");
  };
  auto* lyap = app.add_subcommand("lyapunov", "Lyapunov spectrum of the matrix cocycle");
  common(lyap, true);
  lyap->add_option("--trials", trials, "independent trials")->check(CLI::PositiveNumber);
  lyap->add_option("--csv", options.csv, "per-trial partial sums as CSV");
  auto* dom = app.add_subcommand("domination", "dominated splitting scan, STP and cone checks");
  common(dom, true);
  auto* dim = app.add_subcommand("dim", "full dimension report");
  common(dim, true);
  dim->add_option("--H", H, "fiber-entropy correction H (nats)");
  dim->add_option("--trials", trials, "independent Lyapunov trials")->check(CLI::PositiveNumber);
  dim->add_flag("--assume-ssc", options.assume_ssc, "require a verified separation certificate");
  dim->add_option("--emit-histogram", options.histogram, "CSV of per-center local-dimension slopes");
  dim->add_option("--emit-cloud", options.cloud, "CSV of the sampled point cloud");
  auto* val = app.add_subcommand("validate", "closed-form oracle suite against the pipeline");
  common(val, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (seed) {
      config.seed = *seed;
      config.pipeline.seed = *seed;
    }
    if (trials) {
      config.lyapunov.trials = *trials;
      config.pipeline.lyapunov.trials = *trials;
    }
    if (H) {
      if (*H < 0.0) throw ConfigError("--H must be nonnegative");
      config.pipeline.H = *H;
    }
    CommandResult result;
    std::string name;
    if (lyap->parsed()) {
      name = "lyapunov";
      result = cmd_lyapunov(config, options);
    } else if (dom->parsed()) {
      name = "domination";
      result = cmd_domination(config, options);
    } else if (dim->parsed()) {
      name = "dim";
      result = cmd_dim(config, options);
    } else {
      name = "validate";
      result = cmd_validate(config, options);
    }
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    const std::string text = make_report(name, config, result, options.deterministic).dump(2) + "\n";
    if (!result.table.empty()) std::cout << result.table;
    if (out_path) {
      auto out = open_output(*out_path);
      out << text;
    } else if (result.table.empty()) {
      std::cout << text;
    }
    return result.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidationFailure;
  }
}

}  // namespace affdim::cli
