#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bulb/grid.hpp"
#include "bulb/solver.hpp"

namespace bulb {

enum class Frame { physical, renormalized };
std::string to_string(Frame f);

/// Particles labelled by their seed points.
///
/// Positions are kept on the covering space (never wrapped), so displacements and
/// cluster volumes stay continuous; field evaluation is periodic regardless.
/// In the renormalized frame positions are Y and obey dY/ds = V(Y) + b Y / (alpha + 1).
struct ParticleSet {
  std::vector<Vec3> labels;
  std::vector<Vec3> positions;
  std::vector<double> omega_mag;
  std::vector<double> stretch_integral;  // int xi . grad v . xi along the path
  Frame frame = Frame::physical;
  double alpha = 0.0;  // renormalized frame only

  static ParticleSet seeded(std::vector<Vec3> labels, Frame frame = Frame::physical, double alpha = 0.0);
  std::size_t size() const { return labels.size(); }
  /// Throws DomainError on non-finite positions, negative |omega| or inconsistent sizes.
  void validate() const;
};

/// 5^3 lattice over the centred box plus the lattice argmax of |curl v|.
std::vector<Vec3> default_seeds(const SpectralField& v);

/// Regular tetrahedron with the given centroid and edge length.
std::vector<Vec3> tetrahedron(const Vec3& centroid, double edge);
/// Signed volume of the tetrahedron (a, b, c, d).
double tetrahedron_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

/// Stretching rate xi . grad v . xi with xi = omega / |omega| (0 where omega vanishes).
double stretching_rate(const Mat3& gradient);
Vec3 vorticity_from_gradient(const Mat3& gradient);

/// Classical RK4 for particles, fed one stage field at a time.
///
/// Stage i (0..3) must be evaluated at time t0 + c_i dt with c = (0, 1/2, 1/2, 1);
/// dt is inferred from the stage times, so the same object can ride along the
/// solver's own RK4 stages. Stage 0 also refreshes |omega| at the current positions.
class ParticleIntegrator {
 public:
  explicit ParticleIntegrator(ParticleSet& particles) : p_(particles) {}
  void stage(int index, double time, const SpectralField& velocity, double drift);

 private:
  ParticleSet& p_;
  double t0_ = 0.0, dt_ = 0.0;
  std::vector<Vec3> x0_, kx_[4];
  std::vector<double> kq_[4];
};

/// Velocity and drift coefficient at a given time, for kinematic advection.
struct FrameVelocity {
  SpectralField velocity;
  double drift = 0.0;
};
using VelocityProvider = std::function<FrameVelocity(double)>;

/// One RK4 step of size dt from time t.
ParticleSet advect(ParticleSet particles, const VelocityProvider& provider, double t, double dt);

/// Re-evaluates |omega| at the current positions.
void refresh_vorticity(ParticleSet& particles, const SpectralField& velocity);

struct ParticleFrame {
  double time = 0.0;
  double log_mu = 0.0;
  double grad_sup = 0.0;   // lattice ||grad v||_inf under the run's convention
  double omega_sup = 0.0;  // lattice ||omega||_inf
  std::vector<Vec3> positions;
  std::vector<double> omega_mag;
  std::vector<double> stretch_integral;
};

struct ParticleHistory {
  Frame frame = Frame::physical;
  double alpha = 0.0;
  RenormMode mode = RenormMode::prescribed_coefficient;
  double gamma = 1.0;
  int sign = 1;
  GradNorm convention = GradNorm::frobenius;
  std::vector<Vec3> labels;
  std::vector<ParticleFrame> frames;

  /// Columns: label, t (or s), x, y, z, omega_mag, stretch_integral.
  void write_csv(const std::string& path) const;
};

struct TracerRun {
  RunResult run;
  ParticleSet particles;
  ParticleHistory history;
};

/// Solver run with particles advanced on the solver's RK4 stages; a frame is
/// recorded every `record_stride` steps and at the end.
TracerRun run_with_particles(const SpectralField& v0, const SolverConfig& cfg, ParticleSet particles,
                             TrajectoryLog* log = nullptr, int record_stride = 1);

struct TransportReport {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::size_t excluded = 0;
  std::size_t worst_particle = 0;
  double worst_time = 0.0;
};

/// Compares |omega(X(a,t),t)| with |omega(a,0)| exp(stretch - log mu(t) + log mu(0)) on every frame.
/// Particles meeting |omega| < floor * ||omega||_inf on any frame are excluded.
TransportReport verify_transport_identity(const ParticleHistory& history, double floor = 1e-10);

struct DecayReport {
  double worst_margin = 0.0;  // scaled by max_a |Omega_0(a)|; negative means violated
  std::size_t worst_particle = 0;
  double worst_s = 0.0;
  std::size_t suspended = 0;  // (E-) comparisons skipped after the bound became vacuous
  bool premise_holds = true;  // ||grad V||_inf >= |Omega| at every sampled particle
  std::size_t comparisons = 0;
};

/// Checks |Omega(Y(a,s),s)| against |Omega_0(a)| / (1 +- (gamma - 1) s |Omega_0(a)|)
/// for a self-consistent gradient run (upper bound for sign +1, lower bound for sign -1).
DecayReport verify_renormalized_decay_along_particles(const ParticleHistory& history);

}  // namespace bulb
