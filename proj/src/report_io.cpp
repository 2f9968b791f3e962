#include "bulb/report_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bulb/errors.hpp"
#include "bulb/trajectory_log.hpp"

namespace bulb {

Json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const Json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ConfigError(field, "expected a number or \"inf\"");
}

namespace {

Json params_json(const std::map<std::string, double>& m) {
  Json j = Json::object();
  for (const auto& [k, v] : m) j[k] = json_number(v);
  return j;
}

}  // namespace

Json to_json(const EstimateReport& r) {
  Json j;
  j["id"] = r.id;
  j["pass"] = r.pass;
  j["vacuous"] = r.vacuous;
  j["worst_margin"] = json_number(r.worst_margin);
  j["worst_time"] = json_number(r.worst_time);
  j["tolerance"] = json_number(r.tolerance);
  j["stride"] = r.stride;
  j["rows"] = r.times.size();
  j["parameters"] = params_json(r.parameters);
  j["suspended_from"] = r.suspended_from ? json_number(*r.suspended_from) : Json(nullptr);
  j["note"] = r.note;
  return j;
}

Json to_json(const ExclusionVerdict& v) {
  Json j;
  j["M"] = json_number(v.M);
  j["alpha"] = json_number(v.alpha);
  j["p"] = json_number(v.p);
  j["q"] = json_number(v.q);
  j["threshold"] = json_number(v.threshold);
  j["excluded"] = v.excluded;
  j["excluded_region"] = v.region.to_string();
  j["p0"] = json_number(v.region.p0);
  j["contradiction_region"] = v.region.contradiction.to_string();
  j["in_contradiction_region"] = v.in_contradiction_regime;
  return j;
}

Json to_json(const ConvergenceReport& r) {
  Json j;
  j["p"] = json_number(r.p);
  j["verdict"] = to_string(r.verdict);
  j["rate"] = json_number(r.rate);
  j["norm_rate"] = json_number(r.norm_rate);
  Json s = Json::array(), d = Json::array(), n = Json::array(), rad = Json::array();
  for (double x : r.s) s.push_back(json_number(x));
  for (double x : r.differences) d.push_back(json_number(x));
  for (double x : r.norms) n.push_back(json_number(x));
  for (double x : r.radii) rad.push_back(json_number(x));
  j["s"] = s;
  j["differences"] = d;
  j["norms"] = n;
  j["radii"] = rad;
  j["candidate"] = {{"provenance", to_string(r.candidate.provenance)},
                    {"radius", json_number(r.candidate.window.radius)},
                    {"s", json_number(r.candidate.window.s)}};
  j["note"] = r.note;
  return j;
}

Json to_json(const ResidualReport& r) {
  Json j;
  j["system"] = to_string(r.system);
  j["family_size"] = r.family_size;
  j["max_residual"] = json_number(r.max_residual);
  j["max_normalized"] = json_number(r.max_normalized);
  j["max_divergence_pairing"] = json_number(r.max_divergence_pairing);
  if (r.system == StationarySystem::renormalized_gradient) j["grad_sup"] = json_number(r.grad_sup);
  if (r.system == StationarySystem::stationary_navier_stokes) {
    j["self_pairing"] = json_number(r.self_pairing);
    j["dirichlet"] = json_number(r.dirichlet);
  }
  Json t = Json::array();
  for (double x : r.total) t.push_back(json_number(x));
  j["pairings"] = t;
  return j;
}

Json to_json(const EnergyIdentity& e) {
  return {{"integral", json_number(e.integral)},
          {"closed_form", json_number(e.closed_form)},
          {"relative_difference", json_number(e.relative_difference)}};
}

Json to_json(const BlowupAssessment& b) {
  Json j;
  j["classification"] = to_string(b.classification);
  j["T_est"] = b.T_est ? json_number(*b.T_est) : Json(nullptr);
  j["M_est"] = json_number(b.M_est);
  j["kappa"] = json_number(b.kappa);
  j["C"] = json_number(b.C);
  j["window_begin"] = b.window_begin;
  j["window_rows"] = b.window_rows;
  j["residual"] = json_number(b.residual);
  j["note"] = b.note;
  return j;
}

Json to_json(const BkmInvariantReport& b) {
  return {{"physical_integral", json_number(b.physical_integral)},
          {"renormalized_integral", json_number(b.renormalized_integral)},
          {"relative_difference", json_number(b.relative_difference)},
          {"t_cover", json_number(b.t_cover)},
          {"s_cover", json_number(b.s_cover)}};
}

Json to_json(const TransportReport& t) {
  return {{"max_relative_error", json_number(t.max_relative_error)},
          {"checked", t.checked},
          {"excluded", t.excluded},
          {"worst_particle", t.worst_particle},
          {"worst_time", json_number(t.worst_time)}};
}

Json to_json(const DecayReport& d) {
  return {{"worst_margin", json_number(d.worst_margin)}, {"worst_particle", d.worst_particle},
          {"worst_s", json_number(d.worst_s)},           {"suspended", d.suspended},
          {"premise_holds", d.premise_holds},            {"comparisons", d.comparisons}};
}

Json to_json(const C0Calibration& c) {
  return {{"C", json_number(c.C)},         {"C0", json_number(c.C0)}, {"adopted", json_number(c.adopted)},
          {"samples", c.samples},          {"n", c.n},                {"seed", c.seed},
          {"method", c.method}};
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed for " + path);
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_margin_csv(const std::string& path, const EstimateReport& r) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "t,value,bound,margin\n";
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    out << format_double(r.times[i]) << ',' << format_double(r.values[i]) << ',' << format_double(r.bounds[i]) << ','
        << format_double(r.margins[i]) << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

void write_estimate_report(const std::string& dir, const EstimateReport& r, const std::string& manifest) {
  std::filesystem::create_directories(dir);
  Json j = to_json(r);
  j["manifest"] = manifest;
  write_json(dir + "/" + r.id + ".json", j);
  write_margin_csv(dir + "/" + r.id + ".csv", r);
}

}  // namespace bulb
