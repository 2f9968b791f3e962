#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bulb/diagnostics.hpp"
#include "bulb/similarity.hpp"

namespace bulb {

enum class Provenance { synthesized, run_limit, external };
std::string to_string(Provenance p);
Provenance parse_provenance(const std::string& s);

/// A candidate blow-up profile stored on its window [-R, R)^3.
struct ProfileCandidate {
  WindowField window;
  double alpha = 1.0;
  double gamma = 1.0;
  double p = 2.0;
  Provenance provenance = Provenance::external;

  /// Throws DomainError if the field is not solenoidal to `tol` (relative) or not finite.
  void validate(double tol = 1e-8) const;
};

/// Compactly supported solenoidal template: curl of a sum of Gaussian vector potentials
/// of width `width` with random centres within radius / 8 of the origin.
WindowField gaussian_vortex_template(int n, double radius, double width, std::uint64_t seed, int blobs = 3);

/// v(x, t) = (T - t)^(-alpha/(alpha+1)) V(x / (T - t)^(1/(alpha+1))) on `grid`, V taken as zero outside
/// its window, followed by a Leray projection. Throws DomainError when the scaled window leaves the box.
SpectralField synthesize_selfsimilar(const WindowField& profile, double alpha, double T, double t, const GridSpec& grid);

/// L^p norm over the intersection of the window with the ball |y| < r (r = infinity: whole window).
double window_lp_norm(const PhysicalField& f, double p, double r);

enum class ProfileVerdict { converging, stalling, diverging, vanishing };
/// "vanishing" prints as "diverging-to-zero": the sequence settles on the zero field, which is no profile.
std::string to_string(ProfileVerdict v);

using WindowSchedule = std::function<double(double s)>;

/// Ball radius [(gamma - 1) s + T^(1 - gamma)]^(gamma / ((alpha + 1)(gamma - 1))) used with the power-law transform.
WindowSchedule type2_window(double alpha, double gamma, double T);

struct ConvergenceOptions {
  double p = 2.0;
  /// Compare curls instead of the velocities themselves.
  bool vorticity = false;
  /// Ball radius per snapshot time; empty means the whole window.
  WindowSchedule radius;
};

struct ConvergenceReport {
  std::vector<double> s;
  std::vector<double> radii;        // radius used for difference n (between n and n+1)
  std::vector<double> differences;  // ||Phi_{n+1} - Phi_n||_{L^p(window)}
  std::vector<double> norms;        // ||Phi_n||_{L^p(window)}
  /// Least-squares decay rate of log d_n per snapshot index (log 2 for halving differences).
  double rate = 0.0;
  /// Same fit for the norms; close to `rate` when the sequence collapses to zero.
  double norm_rate = 0.0;
  double p = 2.0;
  ProfileVerdict verdict = ProfileVerdict::stalling;
  ProfileCandidate candidate;  // terminal snapshot
  std::string note;
};

/// Cauchy differences of a snapshot sequence on a common window lattice, with a trend verdict.
/// Needs at least three snapshots; throws DomainError on mismatched lattices.
ConvergenceReport profile_convergence_test(const std::vector<WindowField>& snapshots, const ConvergenceOptions& opts);

/// Divergence-free test function phi = curl(psi e) with psi a product of (1 - u^2)^16 bumps of half-width `radius`.
struct TestFunction {
  Vec3 centre{};
  double radius = 1.0;
  Vec3 direction{0.0, 0.0, 1.0};

  struct Sample {
    double psi = 0.0;
    Vec3 grad_psi{};
    Vec3 phi{};
    Mat3 grad_phi{};  // grad_phi[i][j] = d phi_j / d y_i
    Vec3 lap_phi{};
  };
  /// Zero outside the support cube.
  Sample sample(const Vec3& y) const;
  bool inside(const Vec3& y) const;
};

/// Three scales times eight placements (24 functions) inside a window of the given radius.
std::vector<TestFunction> default_test_family(double window_radius, std::uint64_t seed = 2024);

enum class StationarySystem {
  self_similar_euler,      // alpha V + (y.grad) V + (alpha+1) (V.grad) V = -grad P
  renormalized_gradient,   // -||grad V||_inf [alpha/(alpha+1) V + 1/(alpha+1) (y.grad) V] = (V.grad) V + grad P
  stationary_navier_stokes,  // (V.grad) V = lap V - grad P
  weak_euler_limit,        // (V.grad) V = -grad P
};
std::string to_string(StationarySystem s);
StationarySystem parse_stationary_system(const std::string& s);

struct ResidualReport {
  StationarySystem system = StationarySystem::weak_euler_limit;
  int family_size = 0;
  /// Per test function: nonlinear pairing, linear pairing and their sum.
  std::vector<double> nonlinear, linear, total;
  double max_residual = 0.0;
  /// max_k |total_k| / (int |V|^2 |grad phi_k| + int |V| |L phi_k|), 0 when both vanish.
  double max_normalized = 0.0;
  /// max_k |int V . grad psi_k|, the weak divergence.
  double max_divergence_pairing = 0.0;
  double grad_sup = 0.0;  // coefficient used by the renormalized-gradient system
  /// Stationary Navier-Stokes only: pairing of the system with V itself, and int |grad V|^2.
  double self_pairing = 0.0;
  double dirichlet = 0.0;
};

/// Weak-form pairings of a stationary system against the test family, derivatives moved onto phi.
/// Throws DomainError when a test function leaves the window or the family has fewer than 8 members.
ResidualReport stationary_residual(const ProfileCandidate& candidate, StationarySystem system,
                                   const std::vector<TestFunction>& family, GradNorm convention = GradNorm::frobenius);
ResidualReport stationary_residual(const ProfileCandidate& candidate, StationarySystem system);

struct EnergyIdentity {
  /// int V . [alpha/(alpha+1) V + 1/(alpha+1) (y.grad) V]
  double integral = 0.0;
  /// ((alpha - 3/2) / (alpha + 1)) ||V||_2^2
  double closed_form = 0.0;
  /// |integral - closed_form| over max(|integral|, |closed_form|, ||V||_2^2 / (alpha + 1)).
  double relative_difference = 0.0;
};

/// Throws DomainError when the candidate does not vanish near the window boundary.
EnergyIdentity profile_energy_identity(const ProfileCandidate& candidate, double alpha);

}  // namespace bulb
