#include "report.hpp"

#include <cmath>

namespace affdim::cli {

using nlohmann::json;

namespace {

const Provenance kEst = Provenance::estimated;

json quantities(std::span<const double> values, Provenance p) {
  json out = json::array();
  for (double v : values) out.push_back(quantity(v, p));
  return out;
}

json index_quantities(std::span<const int> values, Provenance p) {
  json out = json::array();
  for (int v : values) out.push_back(quantity(v, p));
  return out;
}

}  // namespace

json quantity(double value, Provenance provenance, std::optional<double> standard_error, bool with_error_field) {
  json q = {{"value", std::isfinite(value) ? json(value) : json(nullptr)}, {"provenance", to_string(provenance)}};
  if (standard_error || with_error_field) q["stderr"] = standard_error ? json(*standard_error) : json(nullptr);
  return q;
}

json spectrum_json(const LyapunovSpectrum& s) {
  json chi = json::array();
  json partial = json::array();
  for (std::size_t j = 0; j < s.chi.size(); ++j) {
    json c = quantity(s.chi[j], kEst, std::nullopt, true);
    json q = quantity(s.partial_sums[j], kEst, std::nullopt, true);
    if (s.standard_error) c["stderr"] = (*s.standard_error)[j];
    if (s.partial_sum_error) q["stderr"] = (*s.partial_sum_error)[j];
    chi.push_back(std::move(c));
    partial.push_back(std::move(q));
  }
  return {{"chi", chi},
          {"partial_sums", partial},
          {"multiplicities", index_quantities(s.multiplicities, kEst)},
          {"gap_threshold", quantity(s.gap_threshold, kEst)},
          {"simple", s.simple()},
          {"steps", quantity(static_cast<double>(s.steps), Provenance::user_supplied)},
          {"trials", quantity(static_cast<double>(s.trials), Provenance::user_supplied)}};
}

json domination_json(const DominationReport& r) {
  json indices = json::array();
  for (const auto& x : r.indices) {
    indices.push_back({{"index", quantity(x.index, kEst)},
                       {"status", to_string(x.status)},
                       {"decay_rate", quantity(x.decay_rate, kEst)},
                       {"tau", quantity(std::exp(x.decay_rate), kEst)},
                       {"constant_estimate", quantity(x.constant_estimate, kEst)},
                       {"fitted_intercept", quantity(x.fitted_intercept, kEst)},
                       {"head_slope", quantity(x.head_slope, kEst)},
                       {"tail_slope", quantity(x.tail_slope, kEst)},
                       {"rms_residual", quantity(x.rms_residual, kEst)},
                       {"n_max", quantity(static_cast<double>(x.n_max), Provenance::user_supplied)}});
  }
  return {{"indices", indices},
          {"dominated_indices", index_quantities(r.dominated_indices, kEst)},
          {"totally_dominated_splitting", r.totally_dominated_splitting()},
          {"exhaustive", r.exhaustive},
          {"slope_epsilon", quantity(r.slope_epsilon, Provenance::user_supplied)}};
}

json separation_json(const SeparationVerdict& v) {
  json out = {{"status", to_string(v.status)},
              {"level", quantity(static_cast<double>(v.level), Provenance::user_supplied)},
              {"pairs_examined", quantity(static_cast<double>(v.pairs_examined), kEst)},
              {"detail", v.detail},
              {"sosc_verified", v.sosc_verified},
              {"sosc_detail", v.sosc_detail}};
  if (v.status == SeparationStatus::ssc_verified) out["gap"] = quantity(v.gap, kEst);
  if (v.witness) {
    const auto word = [](const SymbolWord& w) {
      std::string s;
      for (std::size_t k = 0; k < w.size(); ++k) s += (k ? "." : "") + std::to_string(w[k] + 1);
      return s;
    };
    out["witness"] = {{"first", word(v.witness->first)},
                      {"second", word(v.witness->second)},
                      {"distance", quantity(v.witness->distance, kEst)}};
  }
  return out;
}

json dimension_report_json(const DimensionReport& r) {
  json out;
  out["d"] = quantity(r.d, Provenance::user_supplied);
  out["entropy"] = quantity(r.h, Provenance::closed_form);
  out["H"] = r.H ? quantity(*r.H, r.H_provenance) : json(nullptr);
  out["spectrum"] = spectrum_json(r.spectrum);
  out["routing"] = r.routing;
  out["D"] = index_quantities(r.D, kEst);
  if (r.domination) out["domination"] = domination_json(*r.domination);
  out["separation"] = separation_json(r.separation);
  json proj = json::array();
  for (const auto& [i, p] : r.projections) {
    proj.push_back({{"index", quantity(i, kEst)},
                    {"dimension", quantity(p.value, kEst)},
                    {"used", quantity(p.used, kEst)},
                    {"sample_medians", quantities(p.sample_medians, kEst)},
                    {"sample_iqrs", quantities(p.sample_iqrs, kEst)}});
  }
  out["projections"] = proj;
  out["ly_dim"] = r.ly_dim ? quantity(*r.ly_dim, kEst) : json(nullptr);
  out["conditional_on_H"] = !r.H.has_value();
  if (r.ly_dim_if_H_zero) out["ly_dim_if_H_zero"] = quantity(*r.ly_dim_if_H_zero, kEst);
  out["lyapunov_dim"] = {{"value", quantity(r.lyapunov_dim.value, kEst)},
                         {"raw", quantity(r.lyapunov_dim.raw, kEst)},
                         {"clamped", r.lyapunov_dim.clamped},
                         {"k", quantity(r.lyapunov_dim.k, kEst)}};
  out["empirical_dim"] = {{"median", quantity(r.empirical.median, kEst)},
                          {"q1", quantity(r.empirical.q1, kEst)},
                          {"q3", quantity(r.empirical.q3, kEst)},
                          {"centers", quantity(static_cast<double>(r.empirical.slopes.size()), kEst)},
                          {"skipped_centers", quantity(static_cast<double>(r.empirical.skipped_centers), kEst)}};
  out["box_count_dim"] = r.box_count ? quantity(r.box_count->dimension, kEst) : json(nullptr);
  if (r.equivalence) {
    const auto& e = *r.equivalence;
    json residuals = json::array();
    for (const auto& [i, v] : e.projection_residuals) {
      residuals.push_back({{"index", quantity(i, kEst)}, {"residual", quantity(v, kEst)}});
    }
    out["equivalence"] = {{"result", to_string(e.result)},
                          {"dimensions_equal", e.dimensions_equal},
                          {"conditions_hold", e.conditions_hold},
                          {"dimension_residual", quantity(e.dimension_residual, kEst)},
                          {"H_residual", quantity(e.H_residual, r.H_provenance)},
                          {"projection_residuals", residuals}};
  } else {
    out["equivalence"] = nullptr;
  }
  out["samples"] = quantity(static_cast<double>(r.samples), Provenance::user_supplied);
  out["depth"] = quantity(static_cast<double>(r.depth), kEst);
  out["furstenberg_initialisation"] = "Haar-random initial flags carried back along independent random pasts";
  out["caveats"] = r.caveats;
  return out;
}

}  // namespace affdim::cli
