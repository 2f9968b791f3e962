#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bulb/constants.hpp"
#include "bulb/trajectory_log.hpp"

namespace bulb {

/// One inequality checked along a log.
///
/// Margins are relative and signed so that a non-negative margin means the
/// inequality holds: (bound - value) / max(|bound|, |value|) for upper bounds and
/// (value - bound) / max(|bound|, |value|) for lower bounds (0 when both vanish).
struct EstimateReport {
  std::string id;
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> bounds;
  std::vector<double> margins;
  double worst_margin = 0.0;
  double worst_time = 0.0;
  std::map<std::string, double> parameters;
  int stride = 1;
  double tolerance = 1e-3;
  bool pass = true;
  /// The premise failed or nothing was checkable; the report carries no evidence either way.
  bool vacuous = false;
  /// First time at which the bound left its validity domain (denominator crossed zero).
  std::optional<double> suspended_from;
  std::string note;

  void add(double t, double value, double bound, bool upper);
  /// Same margin from logarithms, for bounds that overflow a double; stores exp of both.
  void add_log(double t, double log_value, double log_bound, bool upper);
  /// Recomputes worst margin and pass flag from the series.
  void finalize(double tol);
};

double relative_margin(double value, double bound, bool upper);
/// relative_margin for positive quantities given by their logarithms.
double log_relative_margin(double log_value, double log_bound, bool upper);

/// Checks ||omega(t)||_inf <= ||omega(t0)||_inf ((T - t0) / (T - t))^M0 for t >= t0.
/// The premise sup_{t > t0} (T - t) ||grad v||_inf <= M0 is checked first; a failure yields a vacuous report.
EstimateReport verify_sup_vorticity_growth(const TrajectoryLog& log, double t0, double T, double M0,
                                           double tol = 1e-3);

/// Lower and upper halves of ||omega(t0)||_p e^(-G) <= ||omega(t)||_p <= ||omega(t0)||_p e^(G),
/// with G = int_{t0}^t ||grad v||_inf.
struct SandwichReports {
  EstimateReport lower;
  EstimateReport upper;
};
SandwichReports verify_lp_sandwich(const TrajectoryLog& log, double p, double t0 = 0.0, double tol = 1e-3);

/// Two-sided power bound on ||Omega(s)||_p / ||Omega(s0)||_p for the power-law frame with exponent 1/(alpha+1),
/// using ||Omega(s)||_p / ||Omega(s0)||_p = ((T - t)/(T - t0))^(1 - 3/((alpha+1)p)) ||omega(t)||_p / ||omega(t0)||_p.
EstimateReport verify_power_sandwich(const TrajectoryLog& log, double p, double t0, double T, double M0, double alpha,
                                     double tol = 1e-3);

/// Smallest M0 making the premise hold on [t0, t_end] for a given T.
double premise_m0(const TrajectoryLog& log, double t0, double T);

struct GammaFamilyReports {
  EstimateReport upper;       // sup vorticity upper bound with exp(+gamma G)
  EstimateReport lower;       // lower bound with exp(-gamma G), while its denominator is positive
  EstimateReport denominator; // floor (1 + ||omega_0|| t)^(1 - gamma) on that denominator
  EstimateReport combined;    // sinh / cosh consequence
};

/// The gamma family of sup-vorticity bounds from t = log start. Requires gamma >= 1.
/// All four rely on ||grad v||_inf >= ||omega||_inf; when the log violates it, the reports are vacuous.
GammaFamilyReports verify_gamma_family(const TrajectoryLog& log, double gamma, double tol = 1e-3);

/// Decay bounds in a renormalized frame, chosen from the log metadata:
///   self-consistent gradient, sign +1: ||Omega(s)||_inf <= W0 / (1 + (gamma - 1) s W0)
///   self-consistent gradient, sign -1: ||Omega(s)||_inf >= W0 / (1 - (gamma - 1) s W0) while positive
///   self-consistent enstrophy:         ||Omega(s)||_2 <= W0 / (1 + (gamma - C0) s W0^4)^(1/4), gamma > C0
/// For the enstrophy case with viscosity nu the constant becomes C0 / nu^3.
EstimateReport verify_renorm_field_decay(const TrajectoryLog& renorm_log, double c0 = kCalibratedC0,
                                         double tol = 1e-3);

/// Enstrophy bound in physical variables and the floor on its denominator.
struct EnstrophyReports {
  EstimateReport bound;
  EstimateReport denominator;
};
EnstrophyReports verify_enstrophy_bound(const TrajectoryLog& log, double gamma, double c0 = kCalibratedC0,
                                        double tol = 1e-3);

/// mu^(-2 + 3/((alpha+1)p)) <= ||Omega(s)||_p / ||Omega_0||_p with mu = exp(int ||grad v||_inf).
/// The renormalized norms are obtained from the physical log through the norm-change identity.
/// Parameter "contradiction_regime" is 1 when the exponent is positive.
EstimateReport verify_ratio_lower_bound(const TrajectoryLog& log, double alpha, double p, double tol = 1e-3);

/// Same check on a renormalized run (self-consistent gradient, gamma = 1, sign +1), reading ||Omega||_p directly
/// and log mu = int ||grad V|| ds from the log.
EstimateReport verify_ratio_lower_bound_renormalized(const TrajectoryLog& renorm_log, double p, double tol = 1e-3);

/// Brute-force estimate of the interpolation constant behind C0:
///   C = max ||Omega||_3 ||grad V||_2 ||Omega||_6 / (||Omega||_2^(3/2) ||grad Omega||_2^(3/2))
/// over random band-limited solenoidal fields, then C0 = 27 C^4 / 64 from Young's inequality.
struct C0Calibration {
  double C = 0.0;
  double C0 = 0.0;
  double adopted = 1.0;  // max(C0, 1): the constant is only ever raised
  int samples = 0;
  int n = 0;
  std::uint64_t seed = 0;
  std::string method;
};
C0Calibration calibrate_c0(int samples, int n, std::uint64_t seed);

}  // namespace bulb
