#pragma once

#include <optional>
#include <span>

#include <nlohmann/json.hpp>

#include "affdim/dimension.hpp"

namespace affdim::cli {

/// A number with its provenance tag.
nlohmann::json quantity(double value, Provenance provenance, std::optional<double> standard_error = std::nullopt,
                        bool with_error_field = false);

nlohmann::json spectrum_json(const LyapunovSpectrum& s);
nlohmann::json domination_json(const DominationReport& r);
nlohmann::json separation_json(const SeparationVerdict& v);
nlohmann::json dimension_report_json(const DimensionReport& r);

}  // namespace affdim::cli
