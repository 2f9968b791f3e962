#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bulb/constants.hpp"
#include "bulb/diagnostics.hpp"
#include "bulb/errors.hpp"
#include "bulb/grid.hpp"
#include "bulb/trajectory_log.hpp"

namespace bulb {

enum class RenormMode { prescribed_coefficient, self_consistent_gradient, self_consistent_enstrophy };
std::string to_string(RenormMode m);
RenormMode parse_renorm_mode(const std::string& s);

/// Renormalized-frame evolution with drift coefficient b = mu'/mu^2.
///
///   prescribed_coefficient:     b = coefficient_schedule(s)
///   self_consistent_gradient:   b = sign * gamma * ||grad V||_inf
///   self_consistent_enstrophy:  b = gamma * ||Omega||_2^4 (alpha is forced to 1)
struct RenormSpec {
  double alpha = 1.0;
  RenormMode mode = RenormMode::prescribed_coefficient;
  double gamma = 1.0;
  int sign = 1;
  std::function<double(double)> coefficient_schedule;
  double c0 = kCalibratedC0;
  GradNorm convention = GradNorm::frobenius;

  void validate() const;
};

struct SolverConfig {
  double viscosity = 0.0;
  double dt = 1e-3;
  double t_end = 0.0;
  double cfl_max = 1.0;
  std::string scheme = "rk4";
  std::optional<RenormSpec> renorm;
  int log_stride = 1;
  DiagnosticsOptions diagnostics;
  /// Runs stop once the spectral tail fraction exceeds this value (0 disables the check).
  double tail_limit = 1e-2;

  void validate() const;
};

/// Velocity at time `time` (t, or s in the renormalized frame).
///
/// For renormalized runs the lattice moves with the similarity variables: the
/// box length is base_length * mu^(1/(alpha+1)) with log mu = log_mu, so the
/// coefficients stay attached to fixed physical points and the y-drift term is
/// carried by the changing wavenumbers rather than by a transport term.
struct SimState {
  SpectralField velocity;
  double time = 0.0;
  long step_count = 0;
  double log_mu = 0.0;
  double base_length = kTwoPi;
};

SimState make_state(const SpectralField& v0);

/// Data seen at each RK4 stage; `velocity.grid` carries the stage box length.
struct StageView {
  int stage = 0;  // 0..3
  double time = 0.0;
  const SpectralField& velocity;
  double log_mu = 0.0;
  double drift = 0.0;  // b at this stage (0 in the physical frame)
};
using StageObserver = std::function<void(const StageView&)>;

/// Thrown when the advective Courant number would exceed cfl_max.
class CflError : public Error {
 public:
  CflError(double courant, double advisory_dt);
  double courant() const { return courant_; }
  double advisory_dt() const { return advisory_dt_; }

 private:
  double courant_, advisory_dt_;
};

/// Thrown when the state stops being finite; carries the last good state.
class SolverFailure : public NumericalError {
 public:
  SolverFailure(const std::string& what, SimState last);
  const SimState& last_state() const { return last_; }

 private:
  SimState last_;
};

/// Drift coefficient b for the given renormalized velocity (grid length already set).
double drift_coefficient(const RenormSpec& spec, const SpectralField& v, double s);

/// One RK4 step of size dt.
SimState step(const SimState& state, const SolverConfig& cfg, double dt, const StageObserver& observer = {});
SimState step(const SimState& state, const SolverConfig& cfg);

struct RunResult {
  SimState state;
  std::string termination = "t_end";
  std::vector<std::string> warnings;
};

/// Integrates to cfg.t_end, logging every cfg.log_stride steps (plus the first and last row).
RunResult run(const SpectralField& v0, const SolverConfig& cfg, TrajectoryLog* log = nullptr,
              const StageObserver& observer = {});

/// Same, starting from an existing state (renormalized runs keep log_mu and the box).
RunResult run_from(SimState state, const SolverConfig& cfg, TrajectoryLog* log = nullptr,
                   const StageObserver& observer = {});

/// Maps each mode m to lambda*m with coefficient factor `scale`; throws if content would be lost.
SpectralField dilate(const SpectralField& f, int lambda, double scale);

struct ScalingReport {
  int lambda = 1;
  double alpha = 0.0;
  double t = 0.0;
  double discrepancy = 0.0;  // L2 norm of the difference
  double reference_norm = 0.0;
  int steps = 0;
};

/// Compares the run from lambda^alpha v0(lambda x) to time t against lambda^alpha v(lambda x, lambda^(alpha+1) t).
/// Both runs keep the same retained band in physical wavenumbers and take the same number of steps.
ScalingReport verify_scaling_property(const SpectralField& v0, int lambda, double alpha, double t,
                                      const SolverConfig& cfg);

/// Integrates forward for cfg.t_end, then back using the v -> -v symmetry of the inviscid system.
/// Returns the L2 distance to the start.
double verify_time_reversibility(const SpectralField& v0, const SolverConfig& cfg);

}  // namespace bulb
