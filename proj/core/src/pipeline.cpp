#include <algorithm>
#include <cmath>
#include <string>

#include "affdim/dimension.hpp"
#include "affdim/errors.hpp"

namespace affdim {

namespace {

// Stream ids for the derived generators of each stage.
enum Stream : std::uint64_t { kSpectrum = 1, kScan, kFlags, kCloud, kEmpirical, kWords, kProjection = 1000 };

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Projection directions V_i-perp (dimension i) per index, one per sample.
struct Directions {
  std::map<int, std::vector<SubspaceFrame>> perp;
};

Directions furstenberg_directions(const IfsSystem& ifs, const PipelineConfig& config, const Rng& root) {
  const int d = ifs.dim();
  FurstenbergOptions opts;
  opts.count = config.projection_samples;
  opts.iterations = config.furstenberg_iterations;
  const auto flags = furstenberg_sample(ifs.linear_parts(), ifs.weights(), {}, opts, root.derive(kFlags));
  Directions out;
  for (const auto& f : flags) {
    // full flag: entry i-1 is V_i with dimension d - i
    for (int i = 1; i < d; ++i) out.perp[i].push_back(f.flag[static_cast<std::size_t>(i - 1)].complement());
  }
  return out;
}

Directions bundle_directions(const IfsSystem& ifs, const PipelineConfig& config, const DominationReport& report,
                             const Rng& root, std::vector<std::string>& caveats) {
  Directions out;
  Rng words = root.derive(kWords);
  for (std::size_t s = 0; s < config.projection_samples; ++s) {
    const SymbolWord future = sample_word(ifs.weights(), config.bundle_depth + 1, words);
    const SymbolWord past = sample_word(ifs.weights(), config.bundle_depth, words);
    for (int i : report.dominated_indices) {
      try {
        const auto b = strong_stable_bundle(ifs.linear_parts(), future, past, i, config.bundle_depth, report);
        out.perp[i].push_back(b.F.complement());
      } catch (const Inconclusive& e) {
        caveats.push_back("bundle F^" + std::to_string(i) + " sample " + std::to_string(s) + " skipped: " + e.what());
      }
    }
  }
  return out;
}

}  // namespace

DimensionReport full_pipeline(const IfsSystem& ifs, const PipelineConfig& config) {
  const int d = ifs.dim();
  const Rng root(config.seed);
  DimensionReport report;
  report.d = d;
  report.seed = config.seed;
  report.h = entropy(ifs.weights());
  report.spectrum = lyapunov_spectrum(ifs.linear_parts(), ifs.weights(), config.lyapunov, root.derive(kSpectrum));

  // Routing and projection directions.
  Directions directions;
  bool applicable = true;
  if (d == 1) {
    report.routing = "simple-spectrum";
  } else if (report.spectrum.simple()) {
    report.routing = "simple-spectrum";
    for (int i = 1; i < d; ++i) report.D.push_back(i);
    directions = furstenberg_directions(ifs, config, root);
  } else {
    GapRatioTable table;
    try {
      table = gap_ratio_scan(ifs.linear_parts(), config.scan_length, config.scan);
    } catch (const BudgetExceeded& e) {
      report.caveats.push_back(std::string(e.what()) + "; used random words instead");
      table = gap_ratio_scan_sampled(ifs.linear_parts(), config.scan_length, config.sampled_scan_words,
                                     root.derive(kScan));
    }
    report.domination = detect_domination(table, config.slope_epsilon);
    if (report.domination->totally_dominated_splitting()) {
      report.routing = "tds";
      report.D = report.domination->dominated_indices;
      directions = bundle_directions(ifs, config, *report.domination, root, report.caveats);
    } else {
      report.routing = "formula-not-applicable";
      applicable = false;
      report.caveats.push_back(
          "repeated exponents without a decided splitting: the dimension formula does not apply");
    }
  }

  // Sampled measure.
  const Box box = attractor_box(ifs);
  const double diameter = (box.upper - box.lower).norm();
  const double r_min = (diameter > 0.0 ? diameter / 10.0 : 1.0) *
                       std::pow(config.local.ratio, static_cast<double>(config.local.radii - 1));
  report.depth = config.depth.value_or(default_depth(ifs, r_min, config.samples));
  report.samples = config.samples;
  const PointCloud cloud = sample_measure(ifs, config.samples, report.depth, root.derive(kCloud));
  report.empirical = local_dimension_estimate(cloud, config.local, root.derive(kEmpirical));
  try {
    report.box_count = box_counting_dimension(cloud);
  } catch (const Inconclusive& e) {
    report.caveats.push_back(std::string("box count: ") + e.what());
  }

  // Projected dimensions.
  double floor = 0.0;
  for (int i : report.D) {
    ProjectionEstimate p;
    p.index = i;
    const auto& frames = directions.perp[i];
    for (std::size_t s = 0; s < frames.size(); ++s) {
      const auto projected = project_cloud(cloud, frames[s]);
      const auto est = local_dimension_estimate(projected, config.local,
                                                root.derive(kProjection + 64 * static_cast<std::uint64_t>(i) + s));
      p.sample_medians.push_back(est.median);
      p.sample_iqrs.push_back(est.iqr());
      p.sample_slopes.push_back(est.slopes);
    }
    if (p.sample_medians.empty()) {
      applicable = false;
      report.caveats.push_back("no projection direction could be estimated for index " + std::to_string(i));
      continue;
    }
    p.value = median_of(p.sample_medians);
    p.used = std::clamp(p.value, 0.0, static_cast<double>(i));
    if (p.used < floor) p.used = floor;
    if (p.used != p.value) {
      report.caveats.push_back("projection dimension for index " + std::to_string(i) + " adjusted from " +
                               std::to_string(p.value) + " to " + std::to_string(p.used) +
                               " (range [0, i] and monotone in i)");
    }
    floor = p.used;
    report.projections[i] = p;
  }

  // Fiber-entropy correction.
  report.separation = check_separation(ifs, config.separation_level, config.separation);
  const bool separated =
      report.separation.status == SeparationStatus::ssc_verified || report.separation.sosc_verified;
  if (config.H) {
    if (!(*config.H >= 0.0 && *config.H <= report.h)) throw InvalidInput("H must lie in [0, h]");
    report.H = *config.H;
    report.H_provenance = Provenance::user_supplied;
  } else if (separated && ifs.weights().strictly_positive()) {
    report.H = 0.0;
    report.H_provenance = Provenance::closed_form;
  } else {
    report.caveats.push_back(
        separated ? "separation verified but some weights are zero: H = 0 is not justified; supply H"
                  : "separation is " + to_string(report.separation.status) +
                        " and the open set condition is not certified: H is unknown, the formula value is "
                        "conditional on H = 0");
  }

  if (config.keep_cloud) report.cloud = cloud;
  report.lyapunov_dim = lyapunov_dimension(report.h, report.spectrum.chi);
  if (applicable) {
    DimensionInputs in;
    in.h = report.h;
    in.H = report.H.value_or(0.0);
    in.chi = report.spectrum.chi;
    in.D = report.D;
    for (const auto& [i, p] : report.projections) in.proj_dims[i] = p.used;
    const double value = ly_dimension(in);
    if (report.H) {
      report.ly_dim = value;
      report.equivalence = kaplan_yorke_equivalence_check(value, report.lyapunov_dim.value, *report.H, in.proj_dims,
                                                          report.D, config.equivalence_tolerance);
    } else {
      report.ly_dim_if_H_zero = value;
    }
  }
  return report;
}

}  // namespace affdim
