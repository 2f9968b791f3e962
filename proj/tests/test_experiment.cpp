#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bulb/errors.hpp"
#include "bulb/experiment.hpp"
#include "bulb/spectral.hpp"
#include "doctest.h"

using namespace bulb;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bulb_exp_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig small(InitialKind kind, double dt, double t_end, int stride) {
  ExperimentConfig c;
  c.grid.n = 32;
  c.initial.kind = kind;
  c.dt = dt;
  c.t_end = t_end;
  c.output.stride = stride;
  c.diagnostics.p_list = {2.0, kInfinity};
  c.diagnostics.convention = GradNorm::entry_sum;
  return c;
}

double max_difference(const SpectralField& a, const SpectralField& b) {
  const PhysicalField pa = to_physical(a), pb = to_physical(b);
  double d = 0.0;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < pa.comp[c].size(); ++i) d = std::max(d, std::abs(pa.comp[c][i] - pb.comp[c][i]));
  return d;
}

}  // namespace

TEST_CASE("simulate writes a complete run directory") {
  const fs::path dir = scratch("smoke");
  const SimulateResult r = cmd_simulate(small(InitialKind::taylor_green, 0.01, 0.1, 2), dir);
  CHECK(r.code == ExitCode::pass);
  CHECK(r.steps == 10);
  CHECK(r.termination == "t_end");
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "final.bulb"));
  CHECK(fs::exists(dir / "snapshots" / "step_00000000.bulb"));
  CHECK(fs::exists(dir / "snapshots" / "step_00000010.bulb"));

  const RunDirectory run = load_run(dir);
  CHECK(run.log.size() == 1 + 10 / 2);
  CHECK(run.manifest["kind"] == "simulate");
  CHECK(run.manifest["config"]["initial"]["type"] == "taylor_green");
  CHECK(run.log.meta.at("manifest") == r.manifest);
  const Snapshot last = read_snapshot((dir / "final.bulb").string());
  CHECK(last.time == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(to_hex(last.manifest) == r.manifest);
  fs::remove_all(dir);
}

TEST_CASE("steady shear is a fixed point") {
  const fs::path dir = scratch("shear");
  ExperimentConfig c = small(InitialKind::shear, 0.01, 0.2, 5);
  c.output.snapshot_stride = 10;
  cmd_simulate(c, dir);
  const Snapshot first = read_snapshot((dir / "snapshots" / "step_00000000.bulb").string());
  const Snapshot last = read_snapshot((dir / "final.bulb").string());
  CHECK(max_difference(first.velocity, last.velocity) < 1e-10);
  CHECK(load_run(dir).snapshots.size() == 3);
  fs::remove_all(dir);
}

TEST_CASE("identical configs give byte-identical artifacts") {
  ExperimentConfig c = small(InitialKind::random_solenoidal, 0.005, 0.05, 2);
  c.initial.seed = 3;
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  cmd_simulate(c, a);
  cmd_simulate(c, b);
  for (const char* f : {"manifest.json", "log.csv", "final.bulb"}) CHECK(slurp(a / f) == slurp(b / f));
  VerifyOptions opts;
  cmd_verify(a, opts, a / "reports");
  cmd_verify(b, opts, b / "reports");
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a / "reports")) {
    CHECK(slurp(e.path()) == slurp(b / "reports" / e.path().filename()));
    ++files;
  }
  CHECK(files > 10);

  c.initial.seed = 4;
  const fs::path other = scratch("det_c");
  cmd_simulate(c, other);
  CHECK(slurp(a / "log.csv") != slurp(other / "log.csv"));
  for (const auto& p : {a, b, other}) fs::remove_all(p);
}

TEST_CASE("mixed manifests are refused") {
  const fs::path a = scratch("mix_a"), b = scratch("mix_b");
  cmd_simulate(small(InitialKind::taylor_green, 0.01, 0.02, 1), a);
  cmd_simulate(small(InitialKind::abc, 0.01, 0.02, 1), b);
  REQUIRE_NOTHROW(load_run(a));
  fs::copy_file(b / "snapshots" / "step_00000002.bulb", a / "snapshots" / "step_00000001.bulb");
  CHECK_THROWS_AS(load_run(a), IoError);
  CHECK_THROWS_AS(cmd_verify(a, VerifyOptions{}, a / "reports"), IoError);
  fs::remove(a / "snapshots" / "step_00000001.bulb");
  fs::copy_file(b / "log.csv", a / "log.csv", fs::copy_options::overwrite_existing);
  CHECK_THROWS_AS(load_run(a), IoError);
  for (const auto& p : {a, b}) fs::remove_all(p);
}

TEST_CASE("verify reports a failing check with exit status 1") {
  // A log whose vorticity grows although the gradient vanishes breaks the upper sandwich bound.
  const fs::path dir = scratch("forged");
  fs::create_directories(dir);
  const std::string hash = write_manifest(dir, Json{{"kind", "simulate"}});
  TrajectoryLog log({2.0});
  log.meta["manifest"] = hash;
  log.meta["viscosity"] = "0";
  log.meta["grad_norm"] = "entry_sum";
  for (int i = 0; i <= 4; ++i) {
    LogRow r;
    r.t = 0.1 * i;
    r.omega_sup = 1.0;
    r.omega_lp = {1.0 + i};
    log.append(r);
  }
  std::ofstream(dir / "log.csv") << [&] {
    std::ostringstream s;
    log.write_csv(s);
    return s.str();
  }();

  VerifyOptions opts;
  opts.verify.checks = {"lp-sandwich"};
  const VerifySummary s = cmd_verify(dir, opts, dir / "reports");
  CHECK(s.code == ExitCode::check_failure);
  CHECK(s.json["pass"] == false);
  const Json upper = read_json((dir / "reports" / "lp-sandwich-upper-p2.json").string());
  CHECK(upper["pass"] == false);
  CHECK(upper["manifest"] == hash);
  CHECK(read_json((dir / "reports" / "lp-sandwich-lower-p2.json").string())["pass"] == true);

  opts.verify.checks = {"lp-sandwich", "renorm-decay"};
  const VerifySummary t = cmd_verify(dir, opts, dir / "reports");
  CHECK(t.json["not_applicable"] == Json::array({"renorm-decay"}));

  CHECK_THROWS_AS(cmd_verify(scratch("absent"), opts, dir / "r2"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("transform under the identity map and profile of a steady flow") {
  const fs::path run = scratch("tr_run"), out = scratch("tr_out");
  ExperimentConfig c = small(InitialKind::shear, 0.01, 0.2, 5);
  c.output.snapshot_stride = 5;
  cmd_simulate(c, run);

  TransformConfig tc;
  tc.alpha = 1.0;
  const TransformResult r = cmd_transform(run, tc, out);
  CHECK(r.snapshots == 5);
  CHECK(r.radius == doctest::Approx(kPi));
  const RunDirectory t = load_run(out);
  CHECK(t.manifest["source"] == load_run(run).manifest_hash);
  CHECK(t.log.meta.at("frame") == "renormalized");
  CHECK(t.log.size() == load_run(run).log.size());
  for (std::size_t i = 0; i < t.snapshots.size(); ++i) {
    const Snapshot pushed = read_snapshot(t.snapshots[i].string());
    const Snapshot source = read_snapshot((run / "snapshots" / t.snapshots[i].filename()).string());
    CHECK(pushed.frame == Frame::renormalized);
    CHECK(pushed.s == doctest::Approx(source.time).epsilon(1e-14));
    CHECK(max_difference(pushed.velocity, source.velocity) < 1e-12);
  }

  TransformConfig wide = tc;
  wide.radius = 4.0;
  try {
    cmd_transform(run, wide, scratch("tr_wide"));
    CHECK(false);
  } catch (const WindowError& e) {
    CHECK(e.max_radius() == doctest::Approx(kPi));
  }

  ProfileConfig pc;
  const ProfileSummary p = cmd_profile(out, pc, out / "profile");
  CHECK(p.convergence.verdict == ProfileVerdict::converging);
  CHECK(p.residual.max_normalized < 1e-6);
  CHECK(fs::exists(out / "profile" / "profile.json"));
  CHECK_THROWS_AS(cmd_profile(run, pc, out / "p2"), ConfigError);
  for (const auto& d : {run, out}) fs::remove_all(d);
}

TEST_CASE("exclusion text") {
  const std::string v = cmd_exclusion(0.5, 1.0, kInfinity);
  CHECK(v.find("excluded: yes") != std::string::npos);
  const std::string region = cmd_exclusion(0.5, 1.0, std::nullopt);
  CHECK(region.find("(0, 1) U (3, inf]") != std::string::npos);
  CHECK(region.find("(0, 0.75)") != std::string::npos);
  CHECK_THROWS_AS(cmd_exclusion(-1.0, 1.0, std::nullopt), DomainError);
}
