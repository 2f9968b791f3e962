#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bulb/errors.hpp"
#include "bulb/grid.hpp"
#include "bulb/trajectory_log.hpp"

namespace bulb {

enum class MuFamily { constant = 0, power_law = 1, exp_gradient = 2, exp_enstrophy = 3 };
std::string to_string(MuFamily f);
MuFamily parse_mu_family(const std::string& s);

struct MuParams {
  MuFamily family = MuFamily::constant;
  double T = 0.0;      // power_law
  double gamma = 1.0;  // power_law, exp families
  int sign = 1;        // exp_gradient
};

/// A schedule mu(t) together with the change of variables
///   y = mu(t)^(1/(alpha+1)) x,   s = int_0^t mu.
///
/// Exponential families are driven by a trajectory log: log mu is built from
/// the logged gradient sup or enstrophy by the trapezoid rule, and s(t) from mu
/// the same way, so the map is reproducible from logged data alone.
class SimilarityMap {
 public:
  static SimilarityMap constant(double alpha);
  static SimilarityMap power_law(double alpha, double T, double gamma);
  static SimilarityMap exp_gradient(double alpha, double gamma, int sign, const TrajectoryLog& log);
  static SimilarityMap exp_enstrophy(double alpha, double gamma, const TrajectoryLog& log);
  static SimilarityMap from_params(double alpha, const MuParams& p, const TrajectoryLog* log);

  double alpha() const { return alpha_; }
  const MuParams& params() const { return params_; }
  MuFamily family() const { return params_.family; }

  double mu(double t) const;
  double log_mu(double t) const;
  double s_of_t(double t) const;
  double t_of_s(double s) const;
  /// b = mu'(t) / mu(t)^2.
  double drift_coefficient(double t) const;
  /// Power law only: g(s) = gamma / (s (gamma - 1) + T^(1 - gamma)).
  double g_of_s(double s) const;
  double space_factor(double t) const { return std::exp(log_mu(t) / (alpha_ + 1.0)); }

  /// Largest t covered (T for the power law is exclusive).
  double t_max() const;
  /// Largest log spacing used by the quadrature table (0 for closed forms).
  double quadrature_step() const { return quad_step_; }

 private:
  SimilarityMap() = default;
  void check_t(double t) const;

  double alpha_ = 0.0;
  MuParams params_;
  std::vector<double> t_, log_mu_, mu_, s_, rate_;  // rate_ = d log mu / dt at table nodes
  double quad_step_ = 0.0;
};

/// Time variable of the first renormalized system, rescaled by 1/(alpha+1).
inline double e1_time(double s, double alpha) { return s / (alpha + 1.0); }

/// Renormalized field on the centred window [-R, R)^3.
struct WindowField {
  SpectralField field;  // grid length 2R, index i at centred coordinate
  double radius = 0.0;
  double t = 0.0;
  double s = 0.0;
  double alpha = 0.0;
  double mu = 1.0;
};

class WindowError : public DomainError {
 public:
  WindowError(double requested, double max_radius);
  double max_radius() const { return max_radius_; }

 private:
  double max_radius_;
};

/// Largest window radius whose preimage fits in the periodic box at time t.
double max_window_radius(const GridSpec& grid, const SimilarityMap& map, double t);

/// V(y, s) = mu^(-alpha/(alpha+1)) v(mu^(-1/(alpha+1)) y, t) on an n_window^3 lattice over [-R, R)^3.
/// n_window = 0 keeps the source lattice size. A radius <= 0 selects the maximal window.
WindowField push_snapshot(const SpectralField& v, double t, const SimilarityMap& map, double radius,
                          int n_window = 0);

/// v(x, t) = mu^(alpha/(alpha+1)) V(mu^(1/(alpha+1)) x) at the given physical points (all images inside the window).
std::vector<Vec3> pull_points(const WindowField& w, const SimilarityMap& map, std::span<const Vec3> points);

/// Full-box inverse; requires the maximal window. `grid` selects the physical lattice.
SpectralField pull_snapshot(const WindowField& w, const SimilarityMap& map, const GridSpec& grid);

/// Renormalized norms implied by a physical log under the map (rows at s = s(t)).
TrajectoryLog renormalize_log(const TrajectoryLog& log, const SimilarityMap& map);

struct BkmInvariantReport {
  double physical_integral = 0.0;
  double renormalized_integral = 0.0;
  double relative_difference = 0.0;
  double t_cover = 0.0;
  double s_cover = 0.0;
};

/// Compares int ||grad v|| dt with int ||grad V|| ds for a physical log and the log of a
/// self-consistent gradient run (gamma, sign read from its metadata).
BkmInvariantReport bkm_invariant_check(const TrajectoryLog& log, const TrajectoryLog& renorm_log);

struct MaximalS {
  double value = 0.0;
  double t_covered = 0.0;
  bool lower_bound = true;
};

/// S = int_0^T_run mu dt, flagged as a lower bound unless the fitted singular time lies inside the run.
MaximalS maximal_s(const SimilarityMap& map, const TrajectoryLog& log);

}  // namespace bulb
