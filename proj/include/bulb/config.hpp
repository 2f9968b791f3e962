#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bulb/grid.hpp"
#include "bulb/profile.hpp"
#include "bulb/similarity.hpp"
#include "bulb/solver.hpp"

namespace bulb {

enum class InitialKind { taylor_green, abc, shear, snapshot_file, random_solenoidal };
std::string to_string(InitialKind k);

struct InitialCondition {
  InitialKind kind = InitialKind::taylor_green;
  double amplitude = 1.0;            // taylor_green, shear, random_solenoidal (rms)
  double A = 1.0, B = 1.0, C = 1.0;  // abc
  std::string path_text;             // snapshot_file, as written in the config
  std::filesystem::path path;        // resolved against the config directory
  std::uint64_t seed = 1;            // random_solenoidal; defaults to the top-level seed
  int band_min = 1, band_max = 4;
};

struct RenormConfig {
  double alpha = 1.0;
  RenormMode mode = RenormMode::self_consistent_gradient;
  double gamma = 1.0;
  int sign = 1;
  double coefficient = 0.0;  // constant b for prescribed_coefficient
  double c0 = kCalibratedC0;
};

struct TransformConfig {
  double alpha = 1.0;
  MuParams mu;
  /// Window radius in similarity variables; 0 picks the largest admissible radius per snapshot.
  double radius = 0.0;
  /// Window lattice size; 0 keeps the run's n.
  int n = 0;
};

struct VerifyConfig {
  std::vector<std::string> checks;  // empty: every check applicable to the run
  double tolerance = 1e-3;
  std::vector<double> gammas{1.0, 2.0, 4.0};
  /// Scaling exponents for the power-law and ratio checks.
  std::vector<double> alphas{1.0, 1.5};
  double t0 = 0.0;
  GradNorm premise_norm = GradNorm::entry_sum;
};

struct ProfileConfig {
  double p = 2.0;
  StationarySystem system = StationarySystem::weak_euler_limit;
  bool vorticity = false;
};

struct OutputConfig {
  std::filesystem::path directory = "run";
  int stride = 1;           // log every `stride` steps
  int snapshot_stride = 0;  // snapshot every so many steps; 0 writes only the initial and final fields
};

/// Names accepted in verify.checks.
const std::vector<std::string>& verify_check_names();

/// A complete experiment read from a JSON file; unknown keys are rejected.
struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 1;
  GridSpec grid;
  double viscosity = 0.0;
  double dt = 1e-3;
  double t_end = 0.0;
  double cfl_max = 1.0;
  double tail_limit = 1e-2;
  InitialCondition initial;
  std::optional<RenormConfig> renorm;
  std::optional<TransformConfig> transform;
  DiagnosticsOptions diagnostics;
  VerifyConfig verify;
  ProfileConfig profile;
  OutputConfig output;

  /// Throws ConfigError naming the field.
  void validate() const;
  SolverConfig solver_config() const;
};

/// Parses config text; `base_dir` resolves relative paths. Errors carry the key path and line.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON echo of a parsed configuration (stable key order).
std::string config_echo(const ExperimentConfig& cfg);

/// Initial velocity described by the config (reads the snapshot file when asked to).
SpectralField initial_velocity(const ExperimentConfig& cfg);

}  // namespace bulb
