#include "bulb/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "bulb/errors.hpp"
#include "bulb/estimates.hpp"
#include "bulb/exclusion.hpp"
#include "bulb/spectral.hpp"

namespace bulb {

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string snapshot_name(long step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "step_%08ld.bulb", step);
  return buf;
}

void write_log(const fs::path& path, const TrajectoryLog& log) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  log.write_csv(out);
  if (!out) throw IoError("write failed for " + path.string());
}

TrajectoryLog read_log(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return TrajectoryLog::read_csv(in);
  } catch (const DomainError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

MuParams renorm_mu(const RenormConfig& r) {
  MuParams mu;
  switch (r.mode) {
    case RenormMode::self_consistent_gradient:
      mu.family = MuFamily::exp_gradient;
      mu.gamma = r.gamma;
      mu.sign = r.sign;
      break;
    case RenormMode::self_consistent_enstrophy:
      mu.family = MuFamily::exp_enstrophy;
      mu.gamma = r.gamma;
      break;
    case RenormMode::prescribed_coefficient: mu.family = MuFamily::constant; break;
  }
  return mu;
}

}  // namespace

std::string write_manifest(const fs::path& dir, const Json& content) {
  const std::string hash = git_blob_hash(content.dump(2) + "\n");
  Json file = content;
  file["manifest"] = hash;
  write_json((dir / "manifest.json").string(), file);
  return hash;
}

RunDirectory load_run(const fs::path& dir) {
  RunDirectory run;
  run.dir = dir;
  run.manifest = read_json((dir / "manifest.json").string());
  if (!run.manifest.contains("manifest") || !run.manifest["manifest"].is_string())
    throw IoError(dir.string() + ": manifest.json lacks its hash");
  run.manifest_hash = run.manifest["manifest"].get<std::string>();
  Json content = run.manifest;
  content.erase("manifest");
  if (git_blob_hash(content.dump(2) + "\n") != run.manifest_hash)
    throw IoError(dir.string() + ": manifest.json does not match its hash");

  run.log = read_log(dir / "log.csv");
  auto it = run.log.meta.find("manifest");
  if (it == run.log.meta.end() || it->second != run.manifest_hash)
    throw IoError(dir.string() + ": log.csv belongs to a different manifest");

  const Sha1 expected = sha1_from_hex(run.manifest_hash);
  std::vector<fs::path> files;
  if (fs::exists(dir / "snapshots")) {
    for (const auto& e : fs::directory_iterator(dir / "snapshots"))
      if (e.path().extension() == ".bulb") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    if (read_snapshot(f.string()).manifest != expected)
      throw IoError(f.string() + " belongs to a different manifest");
  }
  if (fs::exists(dir / "final.bulb") && read_snapshot((dir / "final.bulb").string()).manifest != expected)
    throw IoError((dir / "final.bulb").string() + " belongs to a different manifest");
  run.snapshots = std::move(files);
  return run;
}

SimulateResult cmd_simulate(const ExperimentConfig& cfg, const fs::path& out) {
  cfg.validate();
  fs::create_directories(out / "snapshots");

  Json content;
  content["kind"] = "simulate";
  content["config"] = Json::parse(config_echo(cfg));
  Json inputs = Json::object();
  if (cfg.initial.kind == InitialKind::snapshot_file) inputs["snapshot_file"] = git_blob_hash(read_file(cfg.initial.path));
  content["inputs"] = inputs;
  SimulateResult result;
  result.manifest = write_manifest(out, content);
  const Sha1 manifest = sha1_from_hex(result.manifest);

  const SolverConfig solver = cfg.solver_config();
  const SpectralField v0 = initial_velocity(cfg);

  Snapshot base;
  base.viscosity = cfg.viscosity;
  base.manifest = manifest;
  base.provenance = Provenance::external;
  if (cfg.renorm) {
    base.frame = Frame::renormalized;
    base.alpha = cfg.renorm->alpha;
    base.mu = renorm_mu(*cfg.renorm);
  }
  auto snapshot_at = [&](const SpectralField& v, double time, double log_mu) {
    Snapshot s = base;
    s.velocity = v;
    s.time = time;
    s.log_mu = log_mu;
    if (cfg.renorm) s.s = time;
    return s;
  };

  // Stage 0 of step k sees the state after k steps.
  long stage0_calls = 0;
  std::set<long> written;
  const int every = cfg.output.snapshot_stride;
  StageObserver observer = [&](const StageView& view) {
    if (view.stage != 0) return;
    const long k = stage0_calls++;
    if (k == 0 || (every > 0 && k % every == 0)) {
      write_snapshot((out / "snapshots" / snapshot_name(k)).string(), snapshot_at(view.velocity, view.time, view.log_mu));
      written.insert(k);
    }
  };

  TrajectoryLog log(cfg.diagnostics.p_list);
  log.meta["manifest"] = result.manifest;
  RunResult outcome;
  try {
    outcome = run(v0, solver, &log, observer);
  } catch (const SolverFailure&) {
    log.meta["termination"] = "non_finite";
    write_log(out / "log.csv", log);
    throw;
  }
  log.meta["termination"] = outcome.termination;
  write_log(out / "log.csv", log);

  const SimState& st = outcome.state;
  const Snapshot final_snap = snapshot_at(st.velocity, st.time, st.log_mu);
  if (!written.contains(st.step_count)) {
    write_snapshot((out / "snapshots" / snapshot_name(st.step_count)).string(), final_snap);
    written.insert(st.step_count);
  }
  write_snapshot((out / "final.bulb").string(), final_snap);

  result.termination = outcome.termination;
  result.steps = st.step_count;
  result.snapshots = written.size();
  result.code = outcome.termination == "t_end" ? ExitCode::pass : ExitCode::numerical_failure;
  return result;
}

namespace {

bool in_range(const SimilarityMap& map, double t) {
  return map.family() == MuFamily::power_law ? t < map.t_max() : t <= map.t_max();
}

Json transform_json(const TransformConfig& tc) {
  return {{"alpha", json_number(tc.alpha)}, {"family", to_string(tc.mu.family)}, {"T", json_number(tc.mu.T)},
          {"gamma", json_number(tc.mu.gamma)}, {"sign", tc.mu.sign}, {"radius", json_number(tc.radius)},
          {"n", tc.n}};
}

}  // namespace

TransformResult cmd_transform(const fs::path& run_dir, const TransformConfig& tc, const fs::path& out) {
  const RunDirectory run = load_run(run_dir);
  if (run.log.meta.count("frame") && run.log.meta.at("frame") != "physical")
    throw ConfigError("transform", "the source run is not in the physical frame");
  if (run.snapshots.empty()) throw ConfigError("transform", "the source run has no snapshots");
  const SimilarityMap map = SimilarityMap::from_params(tc.alpha, tc.mu, &run.log);

  std::vector<Snapshot> sources;
  std::vector<fs::path> names;
  TransformResult result;
  for (const auto& f : run.snapshots) {
    Snapshot s = read_snapshot(f.string());
    if (s.frame != Frame::physical) throw ConfigError("transform", f.string() + " is not a physical snapshot");
    if (!in_range(map, s.time)) {
      ++result.skipped;
      continue;
    }
    sources.push_back(std::move(s));
    names.push_back(f.filename());
  }
  if (sources.empty()) throw ConfigError("transform", "no snapshot lies inside the time range of the map");

  double admissible = kInfinity;
  for (const auto& s : sources) admissible = std::min(admissible, max_window_radius(s.velocity.grid, map, s.time));
  const double radius = tc.radius > 0.0 ? tc.radius : admissible;
  if (radius > admissible * (1.0 + 1e-12)) throw WindowError(radius, admissible);

  fs::create_directories(out / "snapshots");
  Json content;
  content["kind"] = "transform";
  content["source"] = run.manifest_hash;
  content["transform"] = transform_json(tc);
  content["radius"] = json_number(radius);
  result.manifest = write_manifest(out, content);
  const Sha1 manifest = sha1_from_hex(result.manifest);

  TrajectoryLog covered(run.log.p_list());
  covered.meta = run.log.meta;
  for (const LogRow& r : run.log.rows())
    if (in_range(map, r.t)) covered.append_raw(r);
  TrajectoryLog renorm = renormalize_log(covered, map);
  renorm.meta["manifest"] = result.manifest;
  renorm.meta["source"] = run.manifest_hash;
  write_log(out / "log.csv", renorm);

  for (std::size_t i = 0; i < sources.size(); ++i) {
    const Snapshot& src = sources[i];
    const WindowField w = push_snapshot(src.velocity, src.time, map, radius, tc.n);
    Snapshot s;
    s.velocity = w.field;
    s.time = src.time;
    s.viscosity = src.viscosity;
    s.frame = Frame::renormalized;
    s.alpha = tc.alpha;
    s.mu = tc.mu;
    s.log_mu = map.log_mu(src.time);
    s.s = w.s;
    s.window_radius = radius;
    s.provenance = Provenance::run_limit;
    s.manifest = manifest;
    write_snapshot((out / "snapshots" / names[i]).string(), s);
  }
  result.radius = radius;
  result.snapshots = sources.size();
  return result;
}

namespace {

// Short label for parameter values in report ids.
std::string tag(double v) {
  if (std::isinf(v)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

EstimateReport tagged(EstimateReport r, const std::string& suffix) {
  r.id += suffix;
  return r;
}

double meta_number(const TrajectoryLog& log, const std::string& key, double fallback) {
  auto it = log.meta.find(key);
  return it == log.meta.end() ? fallback : std::stod(it->second);
}

}  // namespace

VerifySummary cmd_verify(const fs::path& run_dir, const VerifyOptions& opts, const fs::path& out) {
  const RunDirectory run = load_run(run_dir);
  const TrajectoryLog& log = run.log;
  const VerifyConfig& vc = opts.verify;
  if (!(vc.tolerance > 0.0)) throw ConfigError("verify.tolerance", "must be positive");
  if (log.size() < 2) throw ConfigError("verify", "the log has fewer than two rows");

  const std::set<std::string> selected(vc.checks.begin(), vc.checks.end());
  std::set<std::string> applied;
  auto wanted = [&](const std::string& name) {
    if (!selected.empty() && !selected.contains(name)) return false;
    applied.insert(name);
    return true;
  };

  VerifySummary summary;
  auto& reports = summary.reports;
  const double tol = vc.tolerance;
  const std::string frame = log.meta.count("frame") ? log.meta.at("frame") : "physical";

  if (frame == "physical") {
    const double t0 = vc.t0;
    const double T = 2.0 * log.back().t;
    const double nu = meta_number(log, "viscosity", 0.0);
    const double M0 = premise_m0(log, t0, T);
    if (wanted("sup-vorticity-growth")) reports.push_back(verify_sup_vorticity_growth(log, t0, T, M0, tol));
    if (wanted("lp-sandwich")) {
      for (double p : log.p_list()) {
        auto sw = verify_lp_sandwich(log, p, t0, tol);
        reports.push_back(tagged(std::move(sw.lower), "-p" + tag(p)));
        reports.push_back(tagged(std::move(sw.upper), "-p" + tag(p)));
      }
    }
    if (wanted("power-sandwich")) {
      for (double a : vc.alphas)
        for (double p : log.p_list())
          reports.push_back(
              tagged(verify_power_sandwich(log, p, t0, T, M0, a, tol), "-a" + tag(a) + "-p" + tag(p)));
    }
    if (wanted("gamma-family")) {
      for (double g : vc.gammas) {
        if (g < 1.0) continue;
        auto gf = verify_gamma_family(log, g, tol);
        for (auto* r : {&gf.upper, &gf.lower, &gf.denominator, &gf.combined})
          reports.push_back(tagged(std::move(*r), "-g" + tag(g)));
      }
    }
    if (nu > 0.0 && wanted("enstrophy-bound")) {
      // The constant scales as C0 / nu^3; gammas below it are outside the bound's validity domain.
      const double c = kCalibratedC0 / (nu * nu * nu);
      std::vector<double> gs;
      for (double g : vc.gammas)
        if (g >= c) gs.push_back(g);
      gs.push_back(c + 1.0);
      std::sort(gs.begin(), gs.end());
      gs.erase(std::unique(gs.begin(), gs.end()), gs.end());
      for (double g : gs) {
        auto eb = verify_enstrophy_bound(log, g, kCalibratedC0, tol);
        reports.push_back(tagged(std::move(eb.bound), "-g" + tag(g)));
        reports.push_back(tagged(std::move(eb.denominator), "-g" + tag(g)));
      }
    }
    if (wanted("ratio-lower-bound")) {
      for (double a : vc.alphas)
        for (double p : log.p_list())
          reports.push_back(tagged(verify_ratio_lower_bound(log, a, p, tol), "-a" + tag(a) + "-p" + tag(p)));
    }
    if (wanted("blowup")) summary.blowup = estimate_blowup(log);
    if (opts.paired_run) {
      const RunDirectory paired = load_run(*opts.paired_run);
      summary.bkm = bkm_invariant_check(log, paired.log);
    }
  } else if (log.meta.count("renorm_mode")) {
    const RenormMode mode = parse_renorm_mode(log.meta.at("renorm_mode"));
    if (mode == RenormMode::prescribed_coefficient)
      throw ConfigError("verify", "no checks apply to a prescribed-coefficient run");
    const std::string name =
        mode == RenormMode::self_consistent_enstrophy ? "renorm-enstrophy-decay" : "renorm-decay";
    if (wanted(name)) reports.push_back(verify_renorm_field_decay(log, kCalibratedC0, tol));
    const bool unit_gradient = mode == RenormMode::self_consistent_gradient &&
                               meta_number(log, "gamma", 0.0) == 1.0 && meta_number(log, "sign", 0.0) == 1.0;
    if (unit_gradient && wanted("ratio-lower-bound")) {
      for (double p : log.p_list())
        reports.push_back(tagged(verify_ratio_lower_bound_renormalized(log, p, tol), "-p" + tag(p)));
    }
  } else {
    throw ConfigError("verify", "no checks apply to a transformed log; verify the source run instead");
  }

  fs::create_directories(out);
  bool pass = true;
  Json list = Json::array();
  for (const auto& r : reports) {
    write_estimate_report(out.string(), r, run.manifest_hash);
    pass = pass && (r.pass || r.vacuous);
    list.push_back({{"id", r.id}, {"pass", r.pass}, {"vacuous", r.vacuous}, {"worst_margin", json_number(r.worst_margin)}});
  }
  Json& j = summary.json;
  j["manifest"] = run.manifest_hash;
  j["frame"] = frame;
  j["tolerance"] = json_number(tol);
  j["reports"] = list;
  if (summary.blowup) {
    Json b = to_json(*summary.blowup);
    b["manifest"] = run.manifest_hash;
    write_json((out / "blowup.json").string(), b);
    j["blowup"] = to_string(summary.blowup->classification);
  }
  if (summary.bkm) {
    Json b = to_json(*summary.bkm);
    const bool ok = summary.bkm->relative_difference <= tol;
    b["pass"] = ok;
    b["manifest"] = run.manifest_hash;
    write_json((out / "bkm-invariant.json").string(), b);
    j["bkm_invariant"] = {{"pass", ok}, {"relative_difference", json_number(summary.bkm->relative_difference)}};
    pass = pass && ok;
  }
  Json skipped = Json::array();
  for (const auto& c : selected)
    if (!applied.contains(c)) skipped.push_back(c);
  j["not_applicable"] = skipped;
  j["pass"] = pass;
  write_json((out / "summary.json").string(), j);
  summary.code = pass ? ExitCode::pass : ExitCode::check_failure;
  return summary;
}

ProfileSummary cmd_profile(const fs::path& transformed, const ProfileConfig& pc, const fs::path& out) {
  const RunDirectory run = load_run(transformed);
  std::vector<WindowField> windows;
  for (const auto& f : run.snapshots) {
    const Snapshot s = read_snapshot(f.string());
    if (s.frame != Frame::renormalized) throw ConfigError("profile", f.string() + " is not a renormalized snapshot");
    windows.push_back(to_window(s));
  }
  std::stable_sort(windows.begin(), windows.end(), [](const WindowField& a, const WindowField& b) { return a.s < b.s; });

  ProfileSummary summary;
  ConvergenceOptions opts;
  opts.p = pc.p;
  opts.vorticity = pc.vorticity;
  summary.convergence = profile_convergence_test(windows, opts);
  ProfileCandidate candidate = summary.convergence.candidate;
  candidate.p = pc.p;
  summary.residual = stationary_residual(candidate, pc.system);

  Json& j = summary.json;
  j["manifest"] = run.manifest_hash;
  j["convergence"] = to_json(summary.convergence);
  j["residual"] = to_json(summary.residual);
  try {
    summary.energy = profile_energy_identity(candidate, candidate.alpha);
    j["energy_identity"] = to_json(*summary.energy);
  } catch (const DomainError& e) {
    j["energy_identity"] = {{"note", e.what()}};
  }
  fs::create_directories(out);
  write_json((out / "profile.json").string(), j);
  return summary;
}

std::string cmd_exclusion(double M, double alpha, std::optional<double> p) {
  if (p) return exclusion_verdict(M, alpha, *p).to_string();
  const ExclusionRegion r = exclusion_region(M, alpha);
  std::ostringstream s;
  s << "M=" << format_double(M) << " alpha=" << format_double(alpha) << "\n";
  s << "excluded p-region: " << r.to_string() << "\n";
  s << "p0 (sup of excluded p near 0): " << format_double(r.p0) << "\n";
  s << "ratio-bound contradiction region: " << r.contradiction.to_string() << "\n";
  return s.str();
}

}  // namespace bulb
