#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bulb/grid.hpp"
#include "bulb/trajectory_log.hpp"

namespace bulb {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Pointwise matrix norm used for ||grad v||_inf.
///  frobenius:   sqrt(sum_ij |d_i v_j|^2)
///  max_row_sum: max_i sum_j |d_i v_j|
///  entry_sum:   sum_ij |d_i v_j|, which dominates |curl v| pointwise
enum class GradNorm { frobenius, max_row_sum, entry_sum };

std::string to_string(GradNorm g);
GradNorm parse_grad_norm(const std::string& s);
double matrix_norm(const Mat3& m, GradNorm convention);

/// Box quadrature (sum |f|^p h^3)^(1/p) of the pointwise Euclidean magnitude; p = inf gives the lattice max.
double lp_norm(const PhysicalField& f, double p);
double lp_norm(const ScalarLattice& f, double p);

enum class SupMethod { lattice, refined };

struct GradSup {
  double value = 0.0;
  Vec3 location{};
};

/// Sup over the box of the pointwise gradient norm. `refined` polishes the best
/// lattice candidates with a compass search on the trigonometric interpolant.
GradSup grad_sup(const SpectralField& v, GradNorm convention = GradNorm::frobenius,
                 SupMethod method = SupMethod::lattice);

struct DiagnosticsOptions {
  std::vector<double> p_list{2.0, kInfinity};
  GradNorm convention = GradNorm::frobenius;
  double tail_band_start = 0.8;
};

/// Instantaneous diagnostics row for velocity v at time t (accumulators left at zero).
LogRow measure(const SpectralField& v, double t, const DiagnosticsOptions& opts);

enum class BlowupClass { no_blowup, type_I, type_II, undetermined };
std::string to_string(BlowupClass c);

struct BlowupOptions {
  double tail_fraction = 0.3;
  std::size_t min_rows = 8;
  double kappa_tolerance = 0.1;
  double fit_tolerance = 0.05;
};

struct BlowupAssessment {
  std::optional<double> T_est;
  double M_est = 0.0;
  double kappa = 0.0;
  double C = 0.0;
  BlowupClass classification = BlowupClass::undetermined;
  std::size_t window_begin = 0;
  std::size_t window_rows = 0;
  double residual = 0.0;
  std::string note;
};

/// Fits ||grad v||_inf ~ C / (T - t)^kappa on the log tail and classifies the growth.
BlowupAssessment estimate_blowup(const TrajectoryLog& log, const BlowupOptions& opts = {});

/// int_0^t ||omega||_inf by the trapezoid rule on the logged rows.
double bkm_integral(const TrajectoryLog& log, double t);

}  // namespace bulb
