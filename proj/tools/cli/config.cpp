#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "affdim/errors.hpp"

namespace affdim::cli {

using nlohmann::json;

namespace {

// Object view that rejects keys outside `allowed` and reports JSON paths.
class Section {
 public:
  Section(const json& j, std::string path, std::set<std::string> allowed) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    for (const auto& [key, value] : j_.items()) {
      if (!allowed.count(key)) throw ConfigError(path_ + "." + key + ": unknown key");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const json& at(const std::string& key) const { return j_.at(key); }
  std::string path(const std::string& key) const { return path_ + "." + key; }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(path(key) + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path(key) + ": expected a finite number");
    return x;
  }

  double positive(const std::string& key, double fallback) const {
    const double x = number(key, fallback);
    if (!(x > 0.0)) throw ConfigError(path(key) + ": expected a positive number");
    return x;
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback, std::uint64_t minimum = 1) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ConfigError(path(key) + ": expected a nonnegative integer");
    }
    const auto x = v.get<std::uint64_t>();
    if (x < minimum) throw ConfigError(path(key) + ": must be at least " + std::to_string(minimum));
    return x;
  }

 private:
  const json& j_;
  std::string path_;
};

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!v[k].is_number()) throw ConfigError(path + "[" + std::to_string(k) + "]: expected a number");
    out.push_back(v[k].get<double>());
  }
  return out;
}

Matrix parse_matrix(const json& v, const std::string& path, Eigen::Index d) {
  if (!v.is_array() || v.empty()) throw ConfigError(path + ": expected a non-empty array");
  if (v[0].is_array()) {
    Matrix a(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
    for (std::size_t r = 0; r < v.size(); ++r) {
      const auto row = number_list(v[r], path + "[" + std::to_string(r) + "]");
      if (row.size() != v.size()) throw ConfigError(path + ": matrix must be square");
      for (std::size_t c = 0; c < row.size(); ++c) a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
    }
    return a;
  }
  const auto flat = number_list(v, path);
  if (static_cast<Eigen::Index>(flat.size()) != d * d) {
    throw ConfigError(path + ": flat row-major matrix needs " + std::to_string(d * d) + " entries");
  }
  Matrix a(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) a(r, c) = flat[static_cast<std::size_t>(r * d + c)];
  }
  return a;
}

std::vector<double> weights_or_uniform(const Section& s, const std::string& key, std::size_t n) {
  if (!s.has(key)) return std::vector<double>(n, 1.0 / static_cast<double>(n));
  auto w = number_list(s.at(key), s.path(key));
  if (w.size() != n) throw ConfigError(s.path(key) + ": expected " + std::to_string(n) + " weights");
  return w;
}

CarpetSpec parse_carpet(const json& v, const std::string& path) {
  const Section s(v, path, {"m", "n", "digits", "weights"});
  CarpetSpec c;
  c.m = static_cast<int>(s.count("m", 0, 2));
  c.n = static_cast<int>(s.count("n", 0, 2));
  if (!s.has("m") || !s.has("n")) throw ConfigError(path + ": m and n are required");
  if (!s.has("digits") || !s.at("digits").is_array()) throw ConfigError(s.path("digits") + ": expected an array");
  const auto& digits = s.at("digits");
  for (std::size_t k = 0; k < digits.size(); ++k) {
    const auto p = s.path("digits") + "[" + std::to_string(k) + "]";
    const auto cell = number_list(digits[k], p);
    if (cell.size() != 2) throw ConfigError(p + ": expected [column, row]");
    c.digits.push_back({static_cast<int>(cell[0]), static_cast<int>(cell[1])});
  }
  c.weights = weights_or_uniform(s, "weights", c.digits.size());
  return c;
}

SelfSimilarSpec parse_self_similar(const json& v, const std::string& path) {
  const Section s(v, path, {"ratio", "translations", "weights"});
  SelfSimilarSpec out;
  out.ratio = s.positive("ratio", 0.0);
  if (!s.has("translations") || !s.at("translations").is_array()) {
    throw ConfigError(s.path("translations") + ": expected an array");
  }
  const auto& t = s.at("translations");
  for (std::size_t k = 0; k < t.size(); ++k) {
    out.translations.push_back(number_list(t[k], s.path("translations") + "[" + std::to_string(k) + "]"));
  }
  out.weights = weights_or_uniform(s, "weights", out.translations.size());
  return out;
}

json carpet_json(const CarpetSpec& c) {
  json digits = json::array();
  for (const auto& g : c.digits) digits.push_back({g.column, g.row});
  return {{"m", c.m}, {"n", c.n}, {"digits", digits}, {"weights", c.weights}};
}

}  // namespace

IfsSystem carpet_ifs(const CarpetSpec& spec) {
  try {
    return bedford_mcmullen_ifs(spec.digits, spec.weights, spec.m, spec.n);
  } catch (const Error& e) {
    throw ConfigError(std::string("carpet: ") + e.what());
  }
}

IfsSystem self_similar_ifs(const SelfSimilarSpec& spec) {
  if (spec.translations.empty()) throw ConfigError("self_similar: no translations");
  const auto d = static_cast<Eigen::Index>(spec.translations.front().size());
  std::vector<AffineMap> maps;
  for (const auto& t : spec.translations) {
    if (static_cast<Eigen::Index>(t.size()) != d) throw ConfigError("self_similar: translations differ in length");
    maps.push_back({spec.ratio * Matrix::Identity(d, d), Eigen::Map<const Vector>(t.data(), d)});
  }
  try {
    return IfsSystem(std::move(maps), BernoulliWeights(spec.weights));
  } catch (const Error& e) {
    throw ConfigError(std::string("self_similar: ") + e.what());
  }
}

std::vector<ValidateCase> default_validate_suite() {
  ValidateCase carpet;
  carpet.name = "bedford-mcmullen-3x2";
  carpet.carpet = CarpetSpec{3, 2, {{0, 0}, {1, 0}, {2, 1}}, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  ValidateCase cantor;
  cantor.name = "middle-third-cantor";
  cantor.self_similar = SelfSimilarSpec{1.0 / 3, {{0.0}, {2.0 / 3}}, {0.5, 0.5}};
  return {carpet, cantor};
}

IfsSystem RunConfig::ifs() const {
  if (carpet) return carpet_ifs(*carpet);
  if (maps.empty()) throw ConfigError("config: missing key 'ifs'");
  try {
    return IfsSystem(maps, BernoulliWeights(weights));
  } catch (const Error& e) {
    throw ConfigError(std::string("ifs: ") + e.what());
  }
}

RunConfig parse_config(const json& doc) {
  const Section top(doc, "$",
                    {"schema_version", "ifs", "seed", "lyapunov", "domination", "bundle", "measure", "dimension",
                     "validate"});
  if (top.has("schema_version") && top.count("schema_version", kSchemaVersion) != kSchemaVersion) {
    throw ConfigError("$.schema_version: unsupported version (expected " + std::to_string(kSchemaVersion) + ")");
  }
  RunConfig c;
  c.seed = top.count("seed", 1, 0);
  c.pipeline.seed = c.seed;

  if (top.has("ifs")) {
    const Section ifs(top.at("ifs"), "$.ifs", {"maps", "weights", "carpet"});
    if (ifs.has("carpet")) {
      if (ifs.has("maps")) throw ConfigError("$.ifs: give either maps or carpet, not both");
      c.carpet = parse_carpet(ifs.at("carpet"), "$.ifs.carpet");
    } else {
      if (!ifs.has("maps") || !ifs.at("maps").is_array() || ifs.at("maps").empty()) {
        throw ConfigError("$.ifs.maps: expected a non-empty array");
      }
      const auto& maps = ifs.at("maps");
      for (std::size_t k = 0; k < maps.size(); ++k) {
        const auto p = "$.ifs.maps[" + std::to_string(k) + "]";
        const Section m(maps[k], p, {"matrix", "translation"});
        if (!m.has("matrix") || !m.has("translation")) throw ConfigError(p + ": matrix and translation are required");
        const auto t = number_list(m.at("translation"), m.path("translation"));
        const auto d = static_cast<Eigen::Index>(t.size());
        Matrix a = parse_matrix(m.at("matrix"), m.path("matrix"), d);
        if (a.rows() != d) throw ConfigError(p + ": matrix and translation dimensions differ");
        c.maps.push_back({std::move(a), Eigen::Map<const Vector>(t.data(), d)});
      }
      c.weights = weights_or_uniform(ifs, "weights", c.maps.size());
    }
  }

  if (top.has("lyapunov")) {
    const Section s(top.at("lyapunov"), "$.lyapunov", {"steps", "trials", "renormalize_every", "gap_fraction"});
    c.lyapunov.steps = s.count("steps", c.lyapunov.steps, 100);
    c.lyapunov.trials = s.count("trials", c.lyapunov.trials);
    c.lyapunov.renormalize_every = s.count("renormalize_every", c.lyapunov.renormalize_every);
    c.lyapunov.gap_fraction = s.positive("gap_fraction", c.lyapunov.gap_fraction);
  }
  c.pipeline.lyapunov = c.lyapunov;

  if (top.has("domination")) {
    const Section s(top.at("domination"), "$.domination",
                    {"n_max", "budget", "slope_epsilon", "minor_epsilon", "sampled_words"});
    c.domination.n_max = s.count("n_max", c.domination.n_max, 6);
    c.domination.budget = s.count("budget", c.domination.budget);
    c.domination.slope_epsilon = s.positive("slope_epsilon", c.domination.slope_epsilon);
    c.domination.minor_epsilon = s.positive("minor_epsilon", c.domination.minor_epsilon);
    c.pipeline.sampled_scan_words = s.count("sampled_words", c.pipeline.sampled_scan_words);
  }
  c.pipeline.scan_length = c.domination.n_max;
  c.pipeline.scan.budget = c.domination.budget;
  c.pipeline.slope_epsilon = c.domination.slope_epsilon;

  if (top.has("bundle")) {
    const Section s(top.at("bundle"), "$.bundle", {"depth"});
    c.pipeline.bundle_depth = s.count("depth", c.pipeline.bundle_depth);
  }

  if (top.has("measure")) {
    const Section s(top.at("measure"), "$.measure",
                    {"samples", "depth", "centers", "radii", "ratio", "r_max", "min_usable_radii",
                     "separation_level", "pair_budget", "projection_samples", "furstenberg_iterations"});
    auto& p = c.pipeline;
    p.samples = s.count("samples", p.samples, 2);
    if (s.has("depth")) p.depth = s.count("depth", 1);
    p.local.centers = s.count("centers", p.local.centers);
    p.local.radii = s.count("radii", p.local.radii, 2);
    p.local.ratio = s.positive("ratio", p.local.ratio);
    if (p.local.ratio >= 1.0) throw ConfigError("$.measure.ratio: must be below 1");
    if (s.has("r_max")) p.local.r_max = s.positive("r_max", 1.0);
    p.local.min_usable_radii = s.count("min_usable_radii", p.local.min_usable_radii, 2);
    p.separation_level = s.count("separation_level", p.separation_level);
    p.separation.pair_budget = s.count("pair_budget", p.separation.pair_budget);
    p.projection_samples = s.count("projection_samples", p.projection_samples);
    p.furstenberg_iterations = s.count("furstenberg_iterations", p.furstenberg_iterations);
  }

  if (top.has("dimension")) {
    const Section s(top.at("dimension"), "$.dimension", {"H", "equivalence_tolerance"});
    if (s.has("H")) {
      const double h = s.number("H", 0.0);
      if (h < 0.0) throw ConfigError("$.dimension.H: must be nonnegative");
      c.pipeline.H = h;
    }
    c.pipeline.equivalence_tolerance = s.positive("equivalence_tolerance", c.pipeline.equivalence_tolerance);
  }

  if (top.has("validate")) {
    const Section s(top.at("validate"), "$.validate", {"cases"});
    std::vector<ValidateCase> cases;
    if (s.has("cases")) {
      if (!s.at("cases").is_array()) throw ConfigError("$.validate.cases: expected an array");
      const auto& arr = s.at("cases");
      for (std::size_t k = 0; k < arr.size(); ++k) {
        const auto p = "$.validate.cases[" + std::to_string(k) + "]";
        const Section cs(arr[k], p, {"name", "carpet", "self_similar", "tolerance"});
        ValidateCase vc;
        vc.name = cs.has("name") && cs.at("name").is_string() ? cs.at("name").get<std::string>() : "case-" + std::to_string(k + 1);
        if (cs.has("carpet") == cs.has("self_similar")) throw ConfigError(p + ": give exactly one of carpet, self_similar");
        if (cs.has("carpet")) vc.carpet = parse_carpet(cs.at("carpet"), cs.path("carpet"));
        if (cs.has("self_similar")) vc.self_similar = parse_self_similar(cs.at("self_similar"), cs.path("self_similar"));
        vc.tolerance = cs.positive("tolerance", vc.tolerance);
        cases.push_back(std::move(vc));
      }
    }
    c.validate = std::move(cases);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(doc);
}

json RunConfig::resolved() const {
  json out;
  out["schema_version"] = kSchemaVersion;
  if (carpet) {
    out["ifs"] = {{"carpet", carpet_json(*carpet)}};
  } else if (!maps.empty()) {
    json arr = json::array();
    for (const auto& f : maps) {
      json rows = json::array();
      for (Eigen::Index r = 0; r < f.linear.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index k = 0; k < f.linear.cols(); ++k) row.push_back(f.linear(r, k));
        rows.push_back(row);
      }
      arr.push_back({{"matrix", rows}, {"translation", std::vector<double>(f.translation.data(), f.translation.data() + f.translation.size())}});
    }
    out["ifs"] = {{"maps", arr}, {"weights", weights}};
  }
  out["seed"] = seed;
  out["lyapunov"] = {{"steps", lyapunov.steps},
                     {"trials", lyapunov.trials},
                     {"renormalize_every", lyapunov.renormalize_every},
                     {"gap_fraction", lyapunov.gap_fraction}};
  out["domination"] = {{"n_max", domination.n_max},
                       {"budget", domination.budget},
                       {"slope_epsilon", domination.slope_epsilon},
                       {"minor_epsilon", domination.minor_epsilon},
                       {"sampled_words", pipeline.sampled_scan_words}};
  out["bundle"] = {{"depth", pipeline.bundle_depth}};
  json measure = {{"samples", pipeline.samples},
                  {"centers", pipeline.local.centers},
                  {"radii", pipeline.local.radii},
                  {"ratio", pipeline.local.ratio},
                  {"min_usable_radii", pipeline.local.min_usable_radii},
                  {"separation_level", pipeline.separation_level},
                  {"pair_budget", pipeline.separation.pair_budget},
                  {"projection_samples", pipeline.projection_samples},
                  {"furstenberg_iterations", pipeline.furstenberg_iterations}};
  if (pipeline.depth) measure["depth"] = *pipeline.depth;
  if (pipeline.local.r_max) measure["r_max"] = *pipeline.local.r_max;
  out["measure"] = measure;
  json dimension = {{"equivalence_tolerance", pipeline.equivalence_tolerance}};
  if (pipeline.H) dimension["H"] = *pipeline.H;
  out["dimension"] = dimension;
  if (validate) {
    json cases = json::array();
    for (const auto& vc : *validate) {
      json row = {{"name", vc.name}, {"tolerance", vc.tolerance}};
      if (vc.carpet) row["carpet"] = carpet_json(*vc.carpet);
      if (vc.self_similar) {
        row["self_similar"] = {{"ratio", vc.self_similar->ratio},
                               {"translations", vc.self_similar->translations},
                               {"weights", vc.self_similar->weights}};
      }
      cases.push_back(row);
    }
    out["validate"] = {{"cases", cases}};
  }
  return out;
}

}  // namespace affdim::cli
