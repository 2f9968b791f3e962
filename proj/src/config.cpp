#include "bulb/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "bulb/errors.hpp"
#include "bulb/initial.hpp"
#include "bulb/report_io.hpp"
#include "bulb/snapshot_io.hpp"

namespace bulb {

std::string to_string(InitialKind k) {
  switch (k) {
    case InitialKind::taylor_green: return "taylor_green";
    case InitialKind::abc: return "abc";
    case InitialKind::shear: return "shear";
    case InitialKind::snapshot_file: return "snapshot_file";
    case InitialKind::random_solenoidal: return "random_solenoidal";
  }
  return "taylor_green";
}

const std::vector<std::string>& verify_check_names() {
  static const std::vector<std::string> names{
      "sup-vorticity-growth", "lp-sandwich",   "power-sandwich",         "gamma-family",     "renorm-decay",
      "renorm-enstrophy-decay", "enstrophy-bound", "ratio-lower-bound", "blowup"};
  return names;
}

namespace {

// Line of the key path in the source text: each component is searched after the previous one.
int locate(const std::string& text, const std::vector<std::string>& path) {
  std::size_t pos = 0;
  for (const auto& key : path) {
    if (key.empty() || key.front() == '[') continue;
    const std::size_t found = text.find("\"" + key + "\"", pos);
    if (found == std::string::npos) break;
    pos = found;
  }
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

class Node {
 public:
  Node(const Json& j, std::vector<std::string> path, const std::string& text)
      : j_(j), path_(std::move(path)), text_(text) {
    if (!j_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& what, const std::string& key = {}) const {
    std::vector<std::string> p = path_;
    if (!key.empty()) p.push_back(key);
    std::string name;
    for (const auto& c : p) name += (name.empty() || c.front() == '[' ? "" : ".") + c;
    throw ConfigError(name, what + " (line " + std::to_string(locate(text_, p)) + ")");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const Json* raw(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const std::string& key, double fallback) {
    const Json* v = raw(key);
    if (!v) return fallback;
    try {
      return number_from_json(*v, key);
    } catch (const ConfigError&) {
      fail("expected a number", key);
    }
  }
  double required_number(const std::string& key) {
    if (!has(key)) fail("missing required key", key);
    return number(key, 0.0);
  }
  long long integer(const std::string& key, long long fallback) {
    const Json* v = raw(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) fail("expected an integer", key);
    return v->get<long long>();
  }
  bool boolean(const std::string& key, bool fallback) {
    const Json* v = raw(key);
    if (!v) return fallback;
    if (!v->is_boolean()) fail("expected true or false", key);
    return v->get<bool>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    const Json* v = raw(key);
    if (!v) return fallback;
    if (!v->is_string()) fail("expected a string", key);
    return v->get<std::string>();
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    const Json* v = raw(key);
    if (!v) return fallback;
    if (!v->is_array()) fail("expected an array", key);
    std::vector<double> out;
    for (const auto& e : *v) {
      try {
        out.push_back(number_from_json(e, key));
      } catch (const ConfigError&) {
        fail("expected an array of numbers", key);
      }
    }
    return out;
  }
  std::vector<std::string> strings(const std::string& key) {
    const Json* v = raw(key);
    if (!v) return {};
    if (!v->is_array()) fail("expected an array", key);
    std::vector<std::string> out;
    for (const auto& e : *v) {
      if (!e.is_string()) fail("expected an array of strings", key);
      out.push_back(e.get<std::string>());
    }
    return out;
  }
  std::optional<Node> child(const std::string& key) {
    const Json* v = raw(key);
    if (!v) return std::nullopt;
    auto p = path_;
    p.push_back(key);
    return Node(*v, p, text_);
  }

  template <class Fn>
  auto parsed(const std::string& key, const std::string& value, Fn&& fn) -> decltype(fn(value)) {
    try {
      return fn(value);
    } catch (const DomainError& e) {
      fail(e.what(), key);
    }
  }

  /// Rejects keys that were never read.
  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!used_.contains(k)) fail("unknown key", k);
    }
  }

 private:
  const Json& j_;
  std::vector<std::string> path_;
  const std::string& text_;
  std::set<std::string> used_;
};

InitialCondition parse_initial(Node& n, const std::filesystem::path& base_dir, std::uint64_t seed) {
  InitialCondition ic;
  const std::string type = n.string("type", "taylor_green");
  if (type == "taylor_green") {
    ic.kind = InitialKind::taylor_green;
    ic.amplitude = n.number("amplitude", 1.0);
  } else if (type == "abc") {
    ic.kind = InitialKind::abc;
    ic.A = n.number("A", 1.0);
    ic.B = n.number("B", 1.0);
    ic.C = n.number("C", 1.0);
  } else if (type == "shear") {
    ic.kind = InitialKind::shear;
    ic.amplitude = n.number("amplitude", 1.0);
  } else if (type == "snapshot_file") {
    ic.kind = InitialKind::snapshot_file;
    ic.path_text = n.string("path", "");
    if (ic.path_text.empty()) n.fail("missing required key", "path");
    ic.path = base_dir / ic.path_text;
    if (!std::filesystem::exists(ic.path)) n.fail("file not found: " + ic.path.string(), "path");
  } else if (type == "random_solenoidal") {
    ic.kind = InitialKind::random_solenoidal;
    ic.amplitude = n.number("amplitude", 1.0);
    ic.seed = static_cast<std::uint64_t>(n.integer("seed", static_cast<long long>(seed)));
    const std::vector<double> band = n.numbers("band", {1.0, 4.0});
    if (band.size() != 2 || band[0] != std::floor(band[0]) || band[1] != std::floor(band[1]) || band[0] < 1 ||
        band[1] < band[0])
      n.fail("expected [min, max] shell radii with 1 <= min <= max", "band");
    ic.band_min = static_cast<int>(band[0]);
    ic.band_max = static_cast<int>(band[1]);
  } else {
    n.fail("unknown initial condition '" + type + "'", "type");
  }
  n.finish();
  return ic;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const std::size_t at = std::min<std::size_t>(e.byte, text.size());
    const int line =
        1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(at ? at - 1 : 0), '\n'));
    throw ConfigError("", "parse error at line " + std::to_string(line) + ": " + e.what());
  }

  ExperimentConfig cfg;
  Node top(root, {}, text);
  cfg.name = top.string("name", cfg.name);
  cfg.seed = static_cast<std::uint64_t>(top.integer("seed", 1));

  if (auto g = top.child("grid")) {
    cfg.grid.n = static_cast<int>(g->integer("n", cfg.grid.n));
    cfg.grid.dealias_fraction = g->number("dealias_fraction", cfg.grid.dealias_fraction);
    cfg.grid.domain_length = g->number("domain_length", cfg.grid.domain_length);
    try {
      cfg.grid.validate();
    } catch (const DomainError& e) {
      g->fail(e.what());
    }
    g->finish();
  }
  if (auto s = top.child("solver")) {
    cfg.viscosity = s->number("viscosity", cfg.viscosity);
    cfg.dt = s->number("dt", cfg.dt);
    cfg.t_end = s->number("t_end", cfg.t_end);
    cfg.cfl_max = s->number("cfl_max", cfg.cfl_max);
    cfg.tail_limit = s->number("tail_limit", cfg.tail_limit);
    if (!(cfg.viscosity >= 0.0) || !std::isfinite(cfg.viscosity)) s->fail("must be finite and >= 0", "viscosity");
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) s->fail("must be positive", "dt");
    if (!(cfg.t_end >= 0.0) || !std::isfinite(cfg.t_end)) s->fail("must be finite and >= 0", "t_end");
    if (!(cfg.cfl_max > 0.0)) s->fail("must be positive", "cfl_max");
    if (!(cfg.tail_limit >= 0.0)) s->fail("must be >= 0", "tail_limit");
    s->finish();
  }
  if (auto i = top.child("initial")) {
    cfg.initial = parse_initial(*i, base_dir, cfg.seed);
  }
  if (auto r = top.child("renorm")) {
    RenormConfig rc;
    rc.alpha = r->number("alpha", rc.alpha);
    rc.mode = r->parsed("mode", r->string("mode", to_string(rc.mode)), parse_renorm_mode);
    rc.gamma = r->number("gamma", rc.gamma);
    rc.sign = static_cast<int>(r->integer("sign", rc.sign));
    rc.coefficient = r->number("coefficient", rc.coefficient);
    rc.c0 = r->number("c0", rc.c0);
    if (!(rc.alpha > -1.0)) r->fail("must exceed -1", "alpha");
    if (rc.sign != 1 && rc.sign != -1) r->fail("must be 1 or -1", "sign");
    if (!(rc.gamma > 0.0)) r->fail("must be positive", "gamma");
    r->finish();
    cfg.renorm = rc;
  }
  if (auto t = top.child("transform")) {
    TransformConfig tc;
    tc.alpha = t->number("alpha", tc.alpha);
    tc.mu.family = t->parsed("family", t->string("family", "constant"), parse_mu_family);
    tc.mu.T = t->number("T", 0.0);
    tc.mu.gamma = t->number("gamma", 1.0);
    tc.mu.sign = static_cast<int>(t->integer("sign", 1));
    tc.radius = t->number("radius", 0.0);
    tc.n = static_cast<int>(t->integer("n", 0));
    if (!(tc.alpha > -1.0)) t->fail("must exceed -1", "alpha");
    if (tc.mu.family == MuFamily::power_law && !(tc.mu.T > 0.0)) t->fail("power_law needs T > 0", "T");
    if (tc.mu.sign != 1 && tc.mu.sign != -1) t->fail("must be 1 or -1", "sign");
    if (!(tc.radius >= 0.0)) t->fail("must be >= 0", "radius");
    if (tc.n != 0 && (tc.n < 8 || tc.n % 2 != 0)) t->fail("must be 0 or an even number >= 8", "n");
    t->finish();
    cfg.transform = tc;
  }
  if (auto d = top.child("diagnostics")) {
    cfg.diagnostics.p_list = d->numbers("p_list", cfg.diagnostics.p_list);
    if (cfg.diagnostics.p_list.empty()) d->fail("must not be empty", "p_list");
    for (double p : cfg.diagnostics.p_list)
      if (!(p >= 1.0)) d->fail("entries must be >= 1 or \"inf\"", "p_list");
    cfg.diagnostics.convention =
        d->parsed("grad_norm", d->string("grad_norm", to_string(cfg.diagnostics.convention)), parse_grad_norm);
    d->finish();
  }
  if (auto v = top.child("verify")) {
    cfg.verify.checks = v->strings("checks");
    for (const auto& c : cfg.verify.checks) {
      const auto& names = verify_check_names();
      if (std::find(names.begin(), names.end(), c) == names.end()) v->fail("unknown check '" + c + "'", "checks");
    }
    cfg.verify.tolerance = v->number("tolerance", cfg.verify.tolerance);
    if (!(cfg.verify.tolerance > 0.0)) v->fail("must be positive", "tolerance");
    cfg.verify.gammas = v->numbers("gammas", cfg.verify.gammas);
    for (double g : cfg.verify.gammas)
      if (!(g > 0.0) || !std::isfinite(g)) v->fail("entries must be positive", "gammas");
    cfg.verify.alphas = v->numbers("alphas", cfg.verify.alphas);
    for (double a : cfg.verify.alphas)
      if (!(a > -1.0) || !std::isfinite(a)) v->fail("entries must exceed -1", "alphas");
    cfg.verify.t0 = v->number("t0", cfg.verify.t0);
    cfg.verify.premise_norm =
        v->parsed("premise_norm", v->string("premise_norm", to_string(cfg.verify.premise_norm)), parse_grad_norm);
    v->finish();
  }
  if (auto p = top.child("profile")) {
    cfg.profile.p = p->number("p", cfg.profile.p);
    if (!(cfg.profile.p >= 1.0)) p->fail("must be >= 1 or \"inf\"", "p");
    cfg.profile.system =
        p->parsed("system", p->string("system", to_string(cfg.profile.system)), parse_stationary_system);
    cfg.profile.vorticity = p->boolean("vorticity", false);
    p->finish();
  }
  if (auto o = top.child("output")) {
    cfg.output.directory = o->string("directory", cfg.output.directory.string());
    cfg.output.stride = static_cast<int>(o->integer("stride", cfg.output.stride));
    cfg.output.snapshot_stride = static_cast<int>(o->integer("snapshot_stride", cfg.output.snapshot_stride));
    if (cfg.output.stride < 1) o->fail("must be >= 1", "stride");
    if (cfg.output.snapshot_stride < 0) o->fail("must be >= 0", "snapshot_stride");
    o->finish();
  }
  top.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path());
}

void ExperimentConfig::validate() const {
  if (renorm && renorm->mode == RenormMode::self_consistent_enstrophy && !(viscosity > 0.0))
    throw ConfigError("solver.viscosity", "the enstrophy mode needs viscosity > 0");
  try {
    solver_config().validate();
  } catch (const DomainError& e) {
    throw ConfigError("solver", e.what());
  }
}

SolverConfig ExperimentConfig::solver_config() const {
  SolverConfig s;
  s.viscosity = viscosity;
  s.dt = dt;
  s.t_end = t_end;
  s.cfl_max = cfl_max;
  s.tail_limit = tail_limit;
  s.log_stride = output.stride;
  s.diagnostics = diagnostics;
  if (renorm) {
    RenormSpec r;
    r.alpha = renorm->alpha;
    r.mode = renorm->mode;
    r.gamma = renorm->gamma;
    r.sign = renorm->sign;
    r.c0 = renorm->c0;
    r.convention = diagnostics.convention;
    const double b = renorm->coefficient;
    r.coefficient_schedule = [b](double) { return b; };
    s.renorm = r;
  }
  return s;
}

std::string config_echo(const ExperimentConfig& cfg) {
  Json j;
  j["name"] = cfg.name;
  j["seed"] = cfg.seed;
  j["grid"] = {{"n", cfg.grid.n},
               {"dealias_fraction", json_number(cfg.grid.dealias_fraction)},
               {"domain_length", json_number(cfg.grid.domain_length)}};
  j["solver"] = {{"viscosity", json_number(cfg.viscosity)}, {"dt", json_number(cfg.dt)},
                 {"t_end", json_number(cfg.t_end)},         {"cfl_max", json_number(cfg.cfl_max)},
                 {"tail_limit", json_number(cfg.tail_limit)}};
  Json ic{{"type", to_string(cfg.initial.kind)}};
  switch (cfg.initial.kind) {
    case InitialKind::taylor_green:
    case InitialKind::shear: ic["amplitude"] = json_number(cfg.initial.amplitude); break;
    case InitialKind::abc:
      ic["A"] = json_number(cfg.initial.A);
      ic["B"] = json_number(cfg.initial.B);
      ic["C"] = json_number(cfg.initial.C);
      break;
    case InitialKind::snapshot_file: ic["path"] = cfg.initial.path_text; break;
    case InitialKind::random_solenoidal:
      ic["amplitude"] = json_number(cfg.initial.amplitude);
      ic["seed"] = cfg.initial.seed;
      ic["band"] = {cfg.initial.band_min, cfg.initial.band_max};
      break;
  }
  j["initial"] = ic;
  if (cfg.renorm) {
    j["renorm"] = {{"alpha", json_number(cfg.renorm->alpha)}, {"mode", to_string(cfg.renorm->mode)},
                   {"gamma", json_number(cfg.renorm->gamma)}, {"sign", cfg.renorm->sign},
                   {"coefficient", json_number(cfg.renorm->coefficient)}, {"c0", json_number(cfg.renorm->c0)}};
  }
  if (cfg.transform) {
    j["transform"] = {{"alpha", json_number(cfg.transform->alpha)}, {"family", to_string(cfg.transform->mu.family)},
                      {"T", json_number(cfg.transform->mu.T)},       {"gamma", json_number(cfg.transform->mu.gamma)},
                      {"sign", cfg.transform->mu.sign},              {"radius", json_number(cfg.transform->radius)},
                      {"n", cfg.transform->n}};
  }
  Json pl = Json::array();
  for (double p : cfg.diagnostics.p_list) pl.push_back(json_number(p));
  j["diagnostics"] = {{"p_list", pl}, {"grad_norm", to_string(cfg.diagnostics.convention)}};
  Json gs = Json::array();
  for (double g : cfg.verify.gammas) gs.push_back(json_number(g));
  Json as = Json::array();
  for (double a : cfg.verify.alphas) as.push_back(json_number(a));
  j["verify"] = {{"checks", cfg.verify.checks},
                 {"tolerance", json_number(cfg.verify.tolerance)},
                 {"gammas", gs},
                 {"alphas", as},
                 {"t0", json_number(cfg.verify.t0)},
                 {"premise_norm", to_string(cfg.verify.premise_norm)}};
  j["profile"] = {{"p", json_number(cfg.profile.p)},
                  {"system", to_string(cfg.profile.system)},
                  {"vorticity", cfg.profile.vorticity}};
  j["output"] = {{"directory", cfg.output.directory.string()},
                 {"stride", cfg.output.stride},
                 {"snapshot_stride", cfg.output.snapshot_stride}};
  return j.dump(2) + "\n";
}

SpectralField initial_velocity(const ExperimentConfig& cfg) {
  const InitialCondition& ic = cfg.initial;
  switch (ic.kind) {
    case InitialKind::taylor_green: return taylor_green(cfg.grid, ic.amplitude);
    case InitialKind::abc: return abc_flow(cfg.grid, ic.A, ic.B, ic.C);
    case InitialKind::shear: return shear_flow(cfg.grid, ic.amplitude);
    case InitialKind::random_solenoidal:
      return random_solenoidal(cfg.grid, RandomFieldSpec{ic.seed, ic.band_min, ic.band_max, ic.amplitude});
    case InitialKind::snapshot_file: {
      Snapshot snap = read_snapshot(ic.path.string());
      if (!snap.velocity.grid.same_lattice(cfg.grid))
        throw ConfigError("initial.path", "snapshot lattice (n = " + std::to_string(snap.velocity.grid.n) +
                                              ") does not match the grid section");
      return snap.velocity;
    }
  }
  throw ConfigError("initial.type", "unsupported initial condition");
}

}  // namespace bulb
