// Command-line front end: simulate, transform, verify, profile, exclusion.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "bulb/errors.hpp"
#include "bulb/experiment.hpp"
#include "bulb/solver.hpp"

using namespace bulb;

namespace {

int code(ExitCode c) { return static_cast<int>(c); }

double parse_real(const std::string& flag, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(flag, "expected a number or inf, got '" + text + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bulb: pseudospectral Euler/Navier-Stokes runs, similarity transforms and estimate checks"};
  app.require_subcommand(1);

  std::string config_path, out_dir, run_dir, pair_dir;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;

  auto* simulate = app.add_subcommand("simulate", "integrate a configured run");
  simulate->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out_dir, "run directory (default: output.directory)");
  simulate->add_option("--seed", seed, "seed for random initial fields");

  std::optional<double> t_alpha, t_T, t_gamma, t_radius;
  std::optional<int> t_sign, t_n;
  std::optional<std::string> t_family;
  auto* transform = app.add_subcommand("transform", "push run snapshots into similarity variables");
  transform->add_option("--run", run_dir, "physical run directory")->required()->check(CLI::ExistingDirectory);
  transform->add_option("--config", config_path, "config whose transform section is used")->check(CLI::ExistingFile);
  transform->add_option("--out", out_dir, "output directory")->required();
  transform->add_option("--family", t_family, "constant | power_law | exp_gradient | exp_enstrophy");
  transform->add_option("--alpha", t_alpha, "scaling exponent");
  transform->add_option("--T", t_T, "power-law singular time");
  transform->add_option("--gamma", t_gamma, "schedule exponent");
  transform->add_option("--sign", t_sign, "exp_gradient sign (+1 or -1)");
  transform->add_option("--radius", t_radius, "window radius (0: largest admissible)");
  transform->add_option("--n", t_n, "window lattice size (0: keep the run's n)");

  std::vector<std::string> checks;
  auto* verify = app.add_subcommand("verify", "check the estimate suite on a run log");
  verify->add_option("--run", run_dir, "run directory")->required()->check(CLI::ExistingDirectory);
  verify->add_option("--config", config_path, "config whose verify section is used")->check(CLI::ExistingFile);
  verify->add_option("--out", out_dir, "report directory (default: <run>/reports)");
  verify->add_option("--tol", tol, "margin tolerance");
  verify->add_option("--checks", checks, "subset of checks to run");
  verify->add_option("--pair", pair_dir, "self-consistent gradient run for the integral comparison")
      ->check(CLI::ExistingDirectory);

  std::optional<std::string> pr_p, pr_system;
  auto* profile = app.add_subcommand("profile", "convergence and residual tests on transformed snapshots");
  profile->add_option("--run", run_dir, "transform output directory")->required()->check(CLI::ExistingDirectory);
  profile->add_option("--config", config_path, "config whose profile section is used")->check(CLI::ExistingFile);
  profile->add_option("--out", out_dir, "report directory (default: <run>/profile)");
  profile->add_option("--p", pr_p, "Lebesgue exponent (number or inf)");
  profile->add_option("--system", pr_system, "stationary system for the residuals");

  std::string ex_M, ex_alpha;
  std::optional<std::string> ex_p;
  auto* exclusion = app.add_subcommand("exclusion", "excluded exponents for a candidate profile");
  exclusion->add_option("--M", ex_M, "bound on the scaled gradient")->required();
  exclusion->add_option("--alpha", ex_alpha, "scaling exponent")->required();
  exclusion->add_option("--p", ex_p, "Lebesgue exponent (omit for the region)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : code(ExitCode::usage_error);
  }

  try {
    if (*simulate) {
      ExperimentConfig cfg = load_config(config_path);
      if (seed) {
        cfg.seed = *seed;
        cfg.initial.seed = *seed;
      }
      const fs::path out = out_dir.empty() ? cfg.output.directory : fs::path(out_dir);
      const SimulateResult r = cmd_simulate(cfg, out);
      std::cout << "run " << out.string() << "\n  manifest " << r.manifest << "\n  steps " << r.steps
                << "\n  snapshots " << r.snapshots << "\n  termination " << r.termination << "\n";
      return code(r.code);
    }
    if (*transform) {
      TransformConfig tc;
      if (!config_path.empty()) {
        const ExperimentConfig cfg = load_config(config_path);
        if (cfg.transform) tc = *cfg.transform;
      }
      if (t_family) tc.mu.family = parse_mu_family(*t_family);
      if (t_alpha) tc.alpha = *t_alpha;
      if (t_T) tc.mu.T = *t_T;
      if (t_gamma) tc.mu.gamma = *t_gamma;
      if (t_sign) tc.mu.sign = *t_sign;
      if (t_radius) tc.radius = *t_radius;
      if (t_n) tc.n = *t_n;
      const TransformResult r = cmd_transform(run_dir, tc, out_dir);
      std::cout << "transform " << out_dir << "\n  manifest " << r.manifest << "\n  radius " << r.radius
                << "\n  snapshots " << r.snapshots << " (skipped " << r.skipped << ")\n";
      return code(ExitCode::pass);
    }
    if (*verify) {
      VerifyOptions opts;
      if (!config_path.empty()) opts.verify = load_config(config_path).verify;
      if (tol) opts.verify.tolerance = *tol;
      if (!checks.empty()) opts.verify.checks = checks;
      if (!pair_dir.empty()) opts.paired_run = pair_dir;
      const fs::path out = out_dir.empty() ? fs::path(run_dir) / "reports" : fs::path(out_dir);
      const VerifySummary s = cmd_verify(run_dir, opts, out);
      for (const auto& r : s.reports) {
        std::cout << (r.vacuous ? "VACUOUS " : r.pass ? "PASS    " : "FAIL    ") << r.id
                  << "  worst margin " << format_double(r.worst_margin) << "\n";
      }
      if (s.bkm) {
        std::cout << (s.bkm->relative_difference <= opts.verify.tolerance ? "PASS    " : "FAIL    ")
                  << "bkm-invariant  relative difference " << format_double(s.bkm->relative_difference) << "\n";
      }
      if (s.blowup) std::cout << "blowup: " << to_string(s.blowup->classification) << "\n";
      return code(s.code);
    }
    if (*profile) {
      ProfileConfig pc;
      if (!config_path.empty()) pc = load_config(config_path).profile;
      if (pr_p) pc.p = parse_real("--p", *pr_p);
      if (pr_system) pc.system = parse_stationary_system(*pr_system);
      const fs::path out = out_dir.empty() ? fs::path(run_dir) / "profile" : fs::path(out_dir);
      const ProfileSummary s = cmd_profile(run_dir, pc, out);
      std::cout << "verdict " << to_string(s.convergence.verdict) << " (rate " << format_double(s.convergence.rate)
                << ")\nresidual " << to_string(s.residual.system) << " max normalized "
                << format_double(s.residual.max_normalized) << "\n";
      return code(ExitCode::pass);
    }
    if (*exclusion) {
      std::optional<double> p;
      if (ex_p) p = parse_real("--p", *ex_p);
      std::cout << cmd_exclusion(parse_real("--M", ex_M), parse_real("--alpha", ex_alpha), p);
      return code(ExitCode::pass);
    }
  } catch (const CflError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code(ExitCode::usage_error);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return code(ExitCode::numerical_failure);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code(ExitCode::usage_error);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code(ExitCode::usage_error);
  }
  return code(ExitCode::usage_error);
}
