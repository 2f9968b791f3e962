#include <cmath>
#include <filesystem>
#include <fstream>

#include "bulb/digest.hpp"
#include "bulb/errors.hpp"
#include "bulb/initial.hpp"
#include "bulb/report_io.hpp"
#include "bulb/snapshot_io.hpp"
#include "bulb/spectral.hpp"
#include "doctest.h"

using namespace bulb;

namespace {

Snapshot sample_snapshot() {
  GridSpec g;
  g.n = 16;
  g.domain_length = 2.0;
  Snapshot s;
  s.velocity = random_solenoidal(g, RandomFieldSpec{.seed = 5, .band_min = 1, .band_max = 4, .amplitude = 1.0});
  s.time = 0.375;
  s.viscosity = 0.01;
  s.frame = Frame::renormalized;
  s.alpha = 1.5;
  s.mu = MuParams{MuFamily::exp_gradient, 0.0, 2.0, -1};
  s.log_mu = 0.25;
  s.s = 0.5;
  s.window_radius = 1.0;
  s.provenance = Provenance::run_limit;
  s.manifest = sha1("manifest");
  return s;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("bulb_io_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("digests match published values") {
  CHECK(to_hex(sha1("abc")) == "a9993e364706816aba3e25717850c26c9cd0d89d");
  CHECK(to_hex(sha1("")) == "da39a3ee5e6b4b0d3255bfef95601890afd80709");
  CHECK(git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  CHECK(git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  const Sha1 d = sha1("round trip");
  CHECK(sha1_from_hex(to_hex(d)) == d);
  CHECK_THROWS_AS(sha1_from_hex("abc"), DomainError);
  CHECK_THROWS_AS(sha1_from_hex(std::string(40, 'g')), DomainError);
}

TEST_CASE("snapshot round trip") {
  const Snapshot a = sample_snapshot();
  const std::string bytes = encode_snapshot(a);
  const std::size_t n3 = a.velocity.grid.points();
  CHECK(bytes.size() > 3 * n3 * sizeof(double) + 20);
  CHECK(bytes.substr(0, 4) == "BULB");

  const Snapshot b = decode_snapshot(bytes);
  CHECK(b.time == a.time);
  CHECK(b.viscosity == a.viscosity);
  CHECK(b.frame == a.frame);
  CHECK(b.alpha == a.alpha);
  CHECK(b.mu.family == a.mu.family);
  CHECK(b.mu.gamma == a.mu.gamma);
  CHECK(b.mu.sign == a.mu.sign);
  CHECK(b.log_mu == a.log_mu);
  CHECK(b.s == a.s);
  CHECK(b.window_radius == a.window_radius);
  CHECK(b.provenance == a.provenance);
  CHECK(b.manifest == a.manifest);
  CHECK(b.velocity.grid.same_lattice(a.velocity.grid));

  // Physical values survive to roundoff (the field is held spectrally); headers are bitwise.
  const PhysicalField pa = to_physical(a.velocity);
  const PhysicalField pb = to_physical(b.velocity);
  double err = 0.0;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < n3; ++i) err = std::max(err, std::abs(pa.comp[c][i] - pb.comp[c][i]));
  CHECK(err <= 1e-14 * pa.max_abs());
  const std::size_t payload = 3 * n3 * sizeof(double) + 20;
  const std::string again = encode_snapshot(b);
  REQUIRE(again.size() == bytes.size());
  CHECK(again.substr(0, bytes.size() - payload) == bytes.substr(0, bytes.size() - payload));
  CHECK(encode_snapshot(a) == bytes);
}

TEST_CASE("snapshot corruption is detected") {
  const std::string bytes = encode_snapshot(sample_snapshot());
  std::string flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x01;
  CHECK_THROWS_AS(decode_snapshot(flipped), IoError);
  std::string trailer = bytes;
  trailer.back() ^= 0x80;
  CHECK_THROWS_AS(decode_snapshot(trailer), IoError);
  CHECK_THROWS_AS(decode_snapshot(bytes.substr(0, bytes.size() - 1)), IoError);
  CHECK_THROWS_AS(decode_snapshot(bytes.substr(0, 10)), IoError);
  CHECK_THROWS_AS(decode_snapshot(""), IoError);
  std::string magic = bytes;
  magic[0] = 'X';
  CHECK_THROWS_AS(decode_snapshot(magic), IoError);
}

TEST_CASE("snapshot files and windows") {
  const auto dir = temp_dir("snap");
  const Snapshot a = sample_snapshot();
  const std::string path = (dir / "a.bulb").string();
  write_snapshot(path, a);
  const Snapshot b = read_snapshot(path);
  CHECK(b.time == a.time);
  CHECK(b.manifest == a.manifest);
  CHECK_THROWS_AS(read_snapshot((dir / "missing.bulb").string()), IoError);

  const WindowField w = to_window(b);
  CHECK(w.radius == 1.0);
  CHECK(w.s == 0.5);
  CHECK(w.alpha == 1.5);
  CHECK(w.field.grid.domain_length == doctest::Approx(2.0));
  Snapshot wrong = a;
  wrong.window_radius = 3.0;
  CHECK_THROWS_AS(to_window(wrong), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("json numbers keep infinities") {
  CHECK(json_number(1.5) == Json(1.5));
  CHECK(json_number(kInfinity) == Json("inf"));
  CHECK(json_number(-kInfinity) == Json("-inf"));
  CHECK(json_number(std::nan("")) == Json("nan"));
  CHECK(number_from_json(Json("inf"), "p") == kInfinity);
  CHECK(number_from_json(Json(2), "p") == 2.0);
  CHECK(std::isnan(number_from_json(Json("nan"), "p")));
  CHECK_THROWS_AS(number_from_json(Json("two"), "p"), ConfigError);
  CHECK_THROWS_AS(number_from_json(Json::array(), "p"), ConfigError);
}

TEST_CASE("estimate report files") {
  EstimateReport r;
  r.id = "demo";
  r.parameters = {{"p", kInfinity}, {"gamma", 2.0}};
  r.add(0.0, 1.0, 2.0, true);
  r.add(0.5, 1.5, 1.5, true);
  r.add(1.0, 3.0, 2.0, true);
  r.finalize(1e-3);
  REQUIRE_FALSE(r.pass);

  const auto dir = temp_dir("report");
  write_estimate_report(dir.string(), r, "deadbeef");
  const Json j = read_json((dir / "demo.json").string());
  CHECK(j["id"] == "demo");
  CHECK(j["pass"] == false);
  CHECK(j["parameters"]["p"] == "inf");
  CHECK(j["parameters"]["gamma"] == 2.0);
  CHECK(j["manifest"] == "deadbeef");
  CHECK(j["worst_time"] == 1.0);
  CHECK(j["rows"] == 3);
  CHECK(j["suspended_from"].is_null());

  std::ifstream csv(dir / "demo.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line == "t,value,bound,margin");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 3);

  std::ofstream bad(dir / "bad.json");
  bad << "{\n  \"a\": 1,\n  oops\n}\n";
  bad.close();
  CHECK_THROWS_AS(read_json((dir / "bad.json").string()), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("exclusion verdict json") {
  const Json j = to_json(exclusion_verdict(0.5, 1.0, kInfinity));
  CHECK(j["excluded"] == true);
  CHECK(j["p"] == "inf");
  CHECK(j["excluded_region"] == "(0, 1) U (3, inf]");
}
