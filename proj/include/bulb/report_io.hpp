#pragma once

#include <string>

#include "bulb/diagnostics.hpp"
#include "bulb/estimates.hpp"
#include "bulb/exclusion.hpp"
#include "bulb/profile.hpp"
#include "bulb/similarity.hpp"
#include "bulb/tracer.hpp"
#include "json.hpp"

namespace bulb {

using Json = nlohmann::ordered_json;

/// Finite values as numbers; infinities and NaN as the strings "inf", "-inf", "nan".
Json json_number(double v);
/// Inverse of json_number; throws ConfigError (naming `field`) on anything else.
double number_from_json(const Json& j, const std::string& field);

Json to_json(const EstimateReport& r);
Json to_json(const ExclusionVerdict& v);
Json to_json(const ConvergenceReport& r);
Json to_json(const ResidualReport& r);
Json to_json(const EnergyIdentity& e);
Json to_json(const BlowupAssessment& b);
Json to_json(const BkmInvariantReport& b);
Json to_json(const TransportReport& t);
Json to_json(const DecayReport& d);
Json to_json(const C0Calibration& c);

/// Writes `j` with two-space indentation and a trailing newline.
void write_json(const std::string& path, const Json& j);
Json read_json(const std::string& path);

/// Margin series as CSV: t,value,bound,margin (round-trip formatting).
void write_margin_csv(const std::string& path, const EstimateReport& r);

/// Writes <dir>/<id>.json and <dir>/<id>.csv, stamping the manifest hash into the JSON.
void write_estimate_report(const std::string& dir, const EstimateReport& r, const std::string& manifest);

}  // namespace bulb
