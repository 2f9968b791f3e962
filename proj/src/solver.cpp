#include "bulb/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bulb/spectral.hpp"

namespace bulb {

std::string to_string(RenormMode m) {
  switch (m) {
    case RenormMode::prescribed_coefficient: return "prescribed_coefficient";
    case RenormMode::self_consistent_gradient: return "self_consistent_gradient";
    case RenormMode::self_consistent_enstrophy: return "self_consistent_enstrophy";
  }
  return "prescribed_coefficient";
}

RenormMode parse_renorm_mode(const std::string& s) {
  if (s == "prescribed_coefficient") return RenormMode::prescribed_coefficient;
  if (s == "self_consistent_gradient") return RenormMode::self_consistent_gradient;
  if (s == "self_consistent_enstrophy") return RenormMode::self_consistent_enstrophy;
  throw DomainError("unknown renormalization mode '" + s + "'");
}

void RenormSpec::validate() const {
  if (!(alpha > -1.0) || !std::isfinite(alpha)) throw DomainError("renorm: alpha must exceed -1");
  if (sign != 1 && sign != -1) throw DomainError("renorm: sign must be +1 or -1");
  switch (mode) {
    case RenormMode::prescribed_coefficient:
      if (!coefficient_schedule) throw DomainError("renorm: prescribed mode needs a coefficient schedule");
      break;
    case RenormMode::self_consistent_gradient:
      if (!(gamma >= 1.0)) throw DomainError("renorm: gamma must be >= 1 for the gradient mode");
      break;
    case RenormMode::self_consistent_enstrophy:
      if (!(gamma > c0)) throw DomainError("renorm: gamma must exceed C0 for the enstrophy mode");
      if (alpha != 1.0) throw DomainError("renorm: the enstrophy mode requires alpha = 1");
      break;
  }
}

void SolverConfig::validate() const {
  if (!(viscosity >= 0.0) || !std::isfinite(viscosity)) throw DomainError("solver: viscosity must be >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("solver: dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw DomainError("solver: t_end must be >= 0");
  if (!(cfl_max > 0.0 && cfl_max <= 1.0)) throw DomainError("solver: cfl_max must lie in (0, 1]");
  if (scheme != "rk4") throw DomainError("solver: unknown scheme '" + scheme + "'");
  if (log_stride < 1) throw DomainError("solver: log stride must be >= 1");
  if (!(tail_limit >= 0.0)) throw DomainError("solver: tail limit must be >= 0");
  if (renorm) renorm->validate();
}

SimState make_state(const SpectralField& v0) {
  v0.grid.validate();
  SimState s;
  s.velocity = v0;
  s.base_length = v0.grid.domain_length;
  return s;
}

namespace {

std::string cfl_message(double courant, double advisory) {
  std::ostringstream os;
  os << "CFL violation: Courant number " << courant << " exceeds limit; advisory dt " << advisory;
  return os.str();
}

double box_length(const SimState& st, const SolverConfig& cfg, double log_mu) {
  if (!cfg.renorm) return st.base_length;
  return st.base_length * std::exp(log_mu / (cfg.renorm->alpha + 1.0));
}

struct Rhs {
  SpectralField dv;
  double drift = 0.0;
  double max_speed = 0.0;
};

Rhs evaluate_rhs(const SpectralField& v, double s, double log_mu, const SolverConfig& cfg) {
  const GridSpec& g = v.grid;
  const PhysicalField u = to_physical(v);
  const PhysicalField w = to_physical(curl(v));
  PhysicalField cross = PhysicalField::zeros(g);
  double speed2 = 0.0;
  for (std::size_t i = 0; i < g.points(); ++i) {
    const double ux = u.comp[0][i], uy = u.comp[1][i], uz = u.comp[2][i];
    const double wx = w.comp[0][i], wy = w.comp[1][i], wz = w.comp[2][i];
    cross.comp[0][i] = uy * wz - uz * wy;
    cross.comp[1][i] = uz * wx - ux * wz;
    cross.comp[2][i] = ux * wy - uy * wx;
    speed2 = std::max(speed2, ux * ux + uy * uy + uz * uz);
  }
  Rhs r;
  r.max_speed = std::sqrt(speed2);
  SpectralField nonlinear = to_spectral(cross);
  dealias_in_place(nonlinear);
  r.dv = leray_project(nonlinear);

  double nu = cfg.viscosity;
  if (cfg.renorm) {
    const double a = cfg.renorm->alpha;
    nu *= std::exp(log_mu * (1.0 - a) / (a + 1.0));
  }
  if (nu != 0.0) r.dv.add_scaled(laplacian(v), nu);
  if (cfg.renorm) {
    r.drift = drift_coefficient(*cfg.renorm, v, s);
    const double a = cfg.renorm->alpha;
    r.dv.add_scaled(v, -a / (a + 1.0) * r.drift);
  }
  return r;
}

bool all_finite(const SpectralField& f) {
  for (const auto& c : f.comp)
    for (const auto& v : c)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

SpectralField combine(const SpectralField& base, const SpectralField& k, double h, double length) {
  SpectralField out = base;
  out.add_scaled(k, h);
  out.grid.domain_length = length;
  return out;
}

}  // namespace

CflError::CflError(double courant, double advisory_dt)
    : Error(cfl_message(courant, advisory_dt)), courant_(courant), advisory_dt_(advisory_dt) {}

SolverFailure::SolverFailure(const std::string& what, SimState last) : NumericalError(what), last_(std::move(last)) {}

double drift_coefficient(const RenormSpec& spec, const SpectralField& v, double s) {
  switch (spec.mode) {
    case RenormMode::prescribed_coefficient: return spec.coefficient_schedule(s);
    case RenormMode::self_consistent_gradient:
      return spec.sign * spec.gamma * grad_sup(v, spec.convention).value;
    case RenormMode::self_consistent_enstrophy: {
      const SpectralField w = curl(v);
      const double e = box_inner(w, w);
      return spec.gamma * e * e;
    }
  }
  return 0.0;
}

SimState step(const SimState& state, const SolverConfig& cfg, double dt, const StageObserver& observer) {
  const double t0 = state.time;
  const double l0 = state.log_mu;
  const SpectralField& v0 = state.velocity;

  const Rhs k1 = evaluate_rhs(v0, t0, l0, cfg);
  const double h = v0.grid.spacing();
  const double courant = k1.max_speed * dt / h;
  if (courant > cfg.cfl_max) throw CflError(courant, 0.9 * cfg.cfl_max * h / k1.max_speed);
  if (observer) observer({0, t0, v0, l0, k1.drift});

  const double l2 = l0 + 0.5 * dt * k1.drift;
  const SpectralField v2 = combine(v0, k1.dv, 0.5 * dt, box_length(state, cfg, l2));
  const Rhs k2 = evaluate_rhs(v2, t0 + 0.5 * dt, l2, cfg);
  if (observer) observer({1, t0 + 0.5 * dt, v2, l2, k2.drift});

  const double l3 = l0 + 0.5 * dt * k2.drift;
  const SpectralField v3 = combine(v0, k2.dv, 0.5 * dt, box_length(state, cfg, l3));
  const Rhs k3 = evaluate_rhs(v3, t0 + 0.5 * dt, l3, cfg);
  if (observer) observer({2, t0 + 0.5 * dt, v3, l3, k3.drift});

  const double l4 = l0 + dt * k3.drift;
  const SpectralField v4 = combine(v0, k3.dv, dt, box_length(state, cfg, l4));
  const Rhs k4 = evaluate_rhs(v4, t0 + dt, l4, cfg);
  if (observer) observer({3, t0 + dt, v4, l4, k4.drift});

  SimState next = state;
  next.velocity.add_scaled(k1.dv, dt / 6.0);
  next.velocity.add_scaled(k2.dv, dt / 3.0);
  next.velocity.add_scaled(k3.dv, dt / 3.0);
  next.velocity.add_scaled(k4.dv, dt / 6.0);
  next.log_mu = l0 + dt / 6.0 * (k1.drift + 2.0 * k2.drift + 2.0 * k3.drift + k4.drift);
  next.velocity.grid.domain_length = box_length(state, cfg, next.log_mu);
  next.time = t0 + dt;
  next.step_count = state.step_count + 1;
  if (!all_finite(next.velocity) || !std::isfinite(next.log_mu)) {
    throw SolverFailure("non-finite state after step " + std::to_string(next.step_count), state);
  }
  return next;
}

SimState step(const SimState& state, const SolverConfig& cfg) { return step(state, cfg, cfg.dt); }

RunResult run(const SpectralField& v0, const SolverConfig& cfg, TrajectoryLog* log, const StageObserver& observer) {
  return run_from(make_state(v0), cfg, log, observer);
}

RunResult run_from(SimState state, const SolverConfig& cfg, TrajectoryLog* log, const StageObserver& observer) {
  cfg.validate();
  state.velocity.grid.validate();
  RunResult result;
  if (log) {
    if (log->empty() && log->p_list() != cfg.diagnostics.p_list) {
      auto meta = std::move(log->meta);
      *log = TrajectoryLog(cfg.diagnostics.p_list);
      log->meta = std::move(meta);
    } else if (log->p_list() != cfg.diagnostics.p_list) {
      throw DomainError("run: log p-list differs from the diagnostics configuration");
    }
    log->meta["dt"] = format_double(cfg.dt);
    log->meta["stride"] = std::to_string(cfg.log_stride);
    log->meta["viscosity"] = format_double(cfg.viscosity);
    log->meta["grad_norm"] = to_string(cfg.diagnostics.convention);
    log->meta["frame"] = cfg.renorm ? "renormalized" : "physical";
    if (cfg.renorm) {
      log->meta["alpha"] = format_double(cfg.renorm->alpha);
      log->meta["renorm_mode"] = to_string(cfg.renorm->mode);
      log->meta["gamma"] = format_double(cfg.renorm->gamma);
      log->meta["sign"] = std::to_string(cfg.renorm->sign);
      log->meta["drift_norm"] = to_string(cfg.renorm->convention);
    }
  }
  const double end = cfg.t_end;
  const double slack = 1e-9 * cfg.dt;
  if (!(end > state.time + slack)) {
    result.state = std::move(state);
    return result;
  }
  auto record = [&](const SimState& st) {
    LogRow row = measure(st.velocity, st.time, cfg.diagnostics);
    const double tail = row.tail_fraction;
    if (log) log->append(std::move(row));
    return tail;
  };
  double tail = record(state);
  long since_log = 0;
  while (state.time < end - slack) {
    if (cfg.tail_limit > 0.0 && tail > cfg.tail_limit) {
      result.termination = "resolution_exhausted";
      result.warnings.push_back("spectral tail fraction " + format_double(tail) + " exceeds limit at t=" +
                                format_double(state.time));
      break;
    }
    double dt = cfg.dt;
    if (state.time + dt > end - slack) dt = end - state.time;
    state = step(state, cfg, dt, observer);
    ++since_log;
    const bool last = state.time >= end - slack;
    if (since_log == cfg.log_stride || last) {
      tail = record(state);
      since_log = 0;
    }
  }
  if (result.termination == "t_end" && cfg.tail_limit > 0.0 && tail > cfg.tail_limit) {
    result.termination = "resolution_exhausted";
    result.warnings.push_back("spectral tail fraction " + format_double(tail) + " exceeds limit at t=" +
                              format_double(state.time));
  }
  result.state = std::move(state);
  return result;
}

SpectralField dilate(const SpectralField& f, int lambda, double scale) {
  if (lambda < 1) throw DomainError("dilate: lambda must be a positive integer");
  const GridSpec& g = f.grid;
  const double tol = 1e-12 * std::max(f.max_abs(), 1e-300);
  SpectralField out = SpectralField::zeros(g);
  const int nyq = g.n / 2;
  for_each_mode(g, [&](std::size_t idx, int mx, int my, int mz) {
    const int nx = lambda * mx, ny = lambda * my, nz = lambda * mz;
    const bool fits = nx < nyq && std::abs(ny) < nyq && std::abs(nz) < nyq;
    if (!fits) {
      for (int d = 0; d < 3; ++d)
        if (std::abs(f.comp[d][idx]) > tol) throw DomainError("dilate: content would leave the lattice band");
      return;
    }
    const std::size_t dst = g.spectral_index(nx, ny < 0 ? ny + g.n : ny, nz < 0 ? nz + g.n : nz);
    for (int d = 0; d < 3; ++d) out.comp[d][dst] = scale * f.comp[d][idx];
  });
  return out;
}

ScalingReport verify_scaling_property(const SpectralField& v0, int lambda, double alpha, double t,
                                      const SolverConfig& cfg) {
  if (lambda < 1) throw DomainError("scaling: lambda must be a positive integer");
  if (cfg.viscosity != 0.0) throw DomainError("scaling: the property holds for the inviscid system only");
  if (cfg.renorm) throw DomainError("scaling: physical-frame runs only");
  if (!(alpha > -1.0)) throw DomainError("scaling: alpha must exceed -1");
  ScalingReport rep;
  rep.lambda = lambda;
  rep.alpha = alpha;
  rep.t = t;
  const double time_factor = std::pow(double(lambda), alpha + 1.0);
  const double amp = std::pow(double(lambda), alpha);
  const int steps = std::max(1, static_cast<int>(std::ceil(t / cfg.dt - 1e-9)));
  rep.steps = steps;

  // Run B resolves modes up to its cutoff; the matching band for run A is cutoff / lambda.
  const GridSpec gb = v0.grid;
  GridSpec ga = gb;
  ga.dealias_fraction = std::floor(double(gb.dealias_cutoff()) / lambda) / (gb.n / 2);
  if (ga.dealias_fraction <= 0.0) throw DomainError("scaling: lambda too large for the lattice");

  // Both runs start from data the lattice can represent after dilation.
  SpectralField va = dilate(v0, 1, 1.0);
  va.grid = ga;
  const SpectralField vb = dilate(v0, lambda, amp);

  SolverConfig ca = cfg, cb = cfg;
  ca.log_stride = cb.log_stride = 1;
  ca.tail_limit = cb.tail_limit = 0.0;
  cb.t_end = t;
  cb.dt = t / steps;
  ca.t_end = time_factor * t;
  ca.dt = time_factor * cb.dt;
  const SpectralField a_end = run(va, ca).state.velocity;
  const SpectralField b_end = run(vb, cb).state.velocity;

  SpectralField ref = dilate(a_end, lambda, amp);
  ref.grid = gb;
  SpectralField diff = b_end;
  diff.grid = gb;
  diff.add_scaled(ref, -1.0);
  rep.discrepancy = spectral_l2_norm(diff);
  rep.reference_norm = spectral_l2_norm(ref);
  return rep;
}

double verify_time_reversibility(const SpectralField& v0, const SolverConfig& cfg) {
  if (cfg.viscosity != 0.0 || cfg.renorm) throw DomainError("reversibility: inviscid physical runs only");
  SolverConfig c = cfg;
  c.tail_limit = 0.0;
  SpectralField forward = run(v0, c).state.velocity;
  forward *= -1.0;
  SpectralField back = run(forward, c).state.velocity;
  back *= -1.0;
  back.add_scaled(v0, -1.0);
  return spectral_l2_norm(back);
}

}  // namespace bulb
