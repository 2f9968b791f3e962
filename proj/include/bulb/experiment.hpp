#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bulb/config.hpp"
#include "bulb/report_io.hpp"
#include "bulb/snapshot_io.hpp"
#include "bulb/trajectory_log.hpp"

namespace bulb {

namespace fs = std::filesystem;

enum class ExitCode : int { pass = 0, check_failure = 1, usage_error = 2, numerical_failure = 3 };

/// A run directory as written by cmd_simulate or cmd_transform:
///   manifest.json, log.csv, snapshots/step_<8 digits>.bulb (and final.bulb for simulations).
struct RunDirectory {
  fs::path dir;
  Json manifest;
  std::string manifest_hash;
  TrajectoryLog log;
  std::vector<fs::path> snapshots;  // sorted by name, i.e. by step
};

/// Loads a run and checks that the log and every snapshot carry the manifest hash (IoError otherwise).
RunDirectory load_run(const fs::path& dir);

/// Writes manifest.json for the given content and returns its hash.
/// The hash is the git-style blob id of the canonical content; the file adds it under "manifest".
std::string write_manifest(const fs::path& dir, const Json& content);

struct SimulateResult {
  ExitCode code = ExitCode::pass;
  std::string manifest;
  std::string termination;
  long steps = 0;
  std::size_t snapshots = 0;
};

/// Runs the solver described by `cfg` into `out`: manifest.json (config echo and input hashes), log.csv,
/// snapshots/ and final.bulb. Resolution exhaustion yields numerical_failure; a solver blow-up (non-finite
/// state) also writes what was logged up to the failure.
SimulateResult cmd_simulate(const ExperimentConfig& cfg, const fs::path& out);

struct TransformResult {
  std::string manifest;
  double radius = 0.0;
  std::size_t snapshots = 0;
  std::size_t skipped = 0;  // snapshots beyond the map's time range
};

/// Pushes the snapshots of a physical run through the similarity map of `tc` into `out`.
/// With tc.radius = 0 the largest radius admissible for every snapshot is used, so all windows share a lattice.
/// Throws WindowError (carrying the largest admissible radius) when the requested radius does not fit.
TransformResult cmd_transform(const fs::path& run, const TransformConfig& tc, const fs::path& out);

struct VerifyOptions {
  VerifyConfig verify;
  /// A self-consistent gradient run to compare integrals with (physical runs only).
  std::optional<fs::path> paired_run;
};

struct VerifySummary {
  ExitCode code = ExitCode::pass;
  std::vector<EstimateReport> reports;
  std::optional<BkmInvariantReport> bkm;
  std::optional<BlowupAssessment> blowup;
  Json json;
};

/// Runs the inequality checks applicable to the run's frame and writes <id>.json / <id>.csv plus summary.json
/// into `out`. The exit code is check_failure iff some non-vacuous report fails beyond tolerance.
VerifySummary cmd_verify(const fs::path& run, const VerifyOptions& opts, const fs::path& out);

struct ProfileSummary {
  ConvergenceReport convergence;
  ResidualReport residual;
  std::optional<EnergyIdentity> energy;
  Json json;
};

/// Convergence test over the renormalized snapshots of a transform directory, then residuals and the
/// energy identity on the terminal snapshot. Writes profile.json into `out`.
ProfileSummary cmd_profile(const fs::path& transformed, const ProfileConfig& pc, const fs::path& out);

/// Verdict text for (M, alpha, p), or the excluded region when p is absent.
std::string cmd_exclusion(double M, double alpha, std::optional<double> p);

}  // namespace bulb
