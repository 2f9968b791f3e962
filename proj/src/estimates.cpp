#include "bulb/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bulb/diagnostics.hpp"
#include "bulb/errors.hpp"
#include "bulb/initial.hpp"
#include "bulb/solver.hpp"
#include "bulb/spectral.hpp"

namespace bulb {

double relative_margin(double value, double bound, bool upper) {
  const double diff = upper ? bound - value : value - bound;
  const double scale = std::max(std::abs(bound), std::abs(value));
  if (scale == 0.0) return 0.0;
  return diff / scale;
}

double log_relative_margin(double log_value, double log_bound, bool upper) {
  if (std::isinf(log_value) && std::isinf(log_bound) && log_value == log_bound) return 0.0;
  const double d = upper ? log_bound - log_value : log_value - log_bound;
  return d >= 0.0 ? -std::expm1(-d) : std::expm1(d);
}

void EstimateReport::add_log(double t, double log_value, double log_bound, bool upper) {
  times.push_back(t);
  values.push_back(std::exp(log_value));
  bounds.push_back(std::exp(log_bound));
  margins.push_back(log_relative_margin(log_value, log_bound, upper));
}

void EstimateReport::add(double t, double value, double bound, bool upper) {
  times.push_back(t);
  values.push_back(value);
  bounds.push_back(bound);
  margins.push_back(relative_margin(value, bound, upper));
}

void EstimateReport::finalize(double tol) {
  tolerance = tol;
  for (double m : margins)
    if (!std::isfinite(m)) throw NumericalError("estimate " + id + ": non-finite margin");
  if (margins.empty()) {
    worst_margin = 0.0;
    worst_time = 0.0;
    if (!vacuous && note.empty()) note = "no checkable rows";
    vacuous = true;
    pass = true;
    return;
  }
  const auto it = std::min_element(margins.begin(), margins.end());
  worst_margin = *it;
  worst_time = times[static_cast<std::size_t>(it - margins.begin())];
  pass = vacuous || worst_margin >= -tol;
}

namespace {

struct Series {
  std::vector<double> t, grad, omega, gradint;
};

Series series(const TrajectoryLog& log) {
  if (log.empty()) throw DomainError("estimate: empty log");
  Series s;
  s.t = log.times();
  s.grad = log.column("grad_sup");
  s.omega = log.column("omega_sup");
  s.gradint = log.column("gradint");
  return s;
}

int log_stride(const TrajectoryLog& log) {
  const auto it = log.meta.find("stride");
  return it == log.meta.end() ? 1 : std::stoi(it->second);
}

double meta_double(const TrajectoryLog& log, const std::string& key) {
  const auto it = log.meta.find(key);
  if (it == log.meta.end()) throw DomainError("estimate: log metadata lacks '" + key + "'");
  return std::stod(it->second);
}

std::string meta_string(const TrajectoryLog& log, const std::string& key) {
  const auto it = log.meta.find(key);
  if (it == log.meta.end()) throw DomainError("estimate: log metadata lacks '" + key + "'");
  return it->second;
}

EstimateReport make_report(const std::string& id, const TrajectoryLog& log) {
  EstimateReport r;
  r.id = id;
  r.stride = log_stride(log);
  return r;
}

void check_t0(const std::vector<double>& t, double t0) {
  if (t0 < t.front() || t0 > t.back()) throw DomainError("estimate: t0 outside the logged range");
}

/// Value of the cumulative column at t0, exactly 0 at the first row.
double at(const std::vector<double>& t, const std::vector<double>& f, double t0) {
  if (t0 == t.front()) return f.front();
  return interpolate(t, f, t0);
}

bool gradient_dominates(const Series& s) {
  for (std::size_t i = 0; i < s.t.size(); ++i)
    if (s.grad[i] < s.omega[i] * (1.0 - 1e-12)) return false;
  return true;
}

constexpr const char* kPremiseNote = "premise ||grad v||_inf >= ||omega||_inf fails on the log";

}  // namespace

double premise_m0(const TrajectoryLog& log, double t0, double T) {
  const Series s = series(log);
  check_t0(s.t, t0);
  if (!(T > s.t.back())) throw DomainError("estimate: T must exceed the last logged time");
  double m = 0.0;
  for (std::size_t i = 0; i < s.t.size(); ++i)
    if (s.t[i] >= t0) m = std::max(m, (T - s.t[i]) * s.grad[i]);
  return m;
}

EstimateReport verify_sup_vorticity_growth(const TrajectoryLog& log, double t0, double T, double M0, double tol) {
  EstimateReport r = make_report("sup-vorticity-growth", log);
  r.parameters = {{"t0", t0}, {"T", T}, {"M0", M0}};
  const Series s = series(log);
  check_t0(s.t, t0);
  if (!(T > s.t.back())) throw DomainError("estimate: T must exceed the last logged time");
  if (M0 < 0.0) throw DomainError("estimate: M0 must be non-negative");
  const double m = premise_m0(log, t0, T);
  r.parameters["premise_sup"] = m;
  if (m > M0 * (1.0 + 1e-12)) {
    r.vacuous = true;
    r.note = "premise sup (T - t) ||grad v||_inf <= M0 fails";
    r.finalize(tol);
    return r;
  }
  const double w0 = at(s.t, s.omega, t0);
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    if (s.t[i] < t0) continue;
    r.add(s.t[i], s.omega[i], w0 * std::pow((T - t0) / (T - s.t[i]), M0), true);
  }
  r.finalize(tol);
  return r;
}

SandwichReports verify_lp_sandwich(const TrajectoryLog& log, double p, double t0, double tol) {
  const Series s = series(log);
  check_t0(s.t, t0);
  const std::vector<double> w = log.column(lp_label(p));
  const double w0 = at(s.t, w, t0);
  const double g0 = at(s.t, s.gradint, t0);
  SandwichReports out{make_report("lp-sandwich-lower", log), make_report("lp-sandwich-upper", log)};
  for (EstimateReport* r : {&out.lower, &out.upper}) r->parameters = {{"p", p}, {"t0", t0}};
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    if (s.t[i] < t0) continue;
    const double G = s.gradint[i] - g0;
    out.lower.add(s.t[i], w[i], w0 * std::exp(-G), false);
    out.upper.add(s.t[i], w[i], w0 * std::exp(G), true);
  }
  out.lower.finalize(tol);
  out.upper.finalize(tol);
  return out;
}

EstimateReport verify_power_sandwich(const TrajectoryLog& log, double p, double t0, double T, double M0, double alpha,
                                     double tol) {
  if (!(alpha > -1.0)) throw DomainError("estimate: alpha must exceed -1");
  EstimateReport r = make_report("power-sandwich", log);
  const double q = std::isinf(p) ? 0.0 : 3.0 / ((alpha + 1.0) * p);
  r.parameters = {{"p", p}, {"t0", t0}, {"T", T}, {"M0", M0}, {"alpha", alpha}};
  const Series s = series(log);
  check_t0(s.t, t0);
  const double m = premise_m0(log, t0, T);
  r.parameters["premise_sup"] = m;
  if (m > M0 * (1.0 + 1e-12)) {
    r.vacuous = true;
    r.note = "premise sup (T - t) ||grad v||_inf <= M0 fails";
    r.finalize(tol);
    return r;
  }
  const std::vector<double> w = log.column(lp_label(p));
  const double w0 = at(s.t, w, t0);
  if (w0 == 0.0) {
    r.vacuous = true;
    r.note = "vorticity vanishes at t0";
    r.finalize(tol);
    return r;
  }
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    if (s.t[i] < t0) continue;
    const double x = (T - s.t[i]) / (T - t0);
    const double ratio = std::pow(x, 1.0 - q) * w[i] / w0;
    const double lo = std::pow(x, M0 + 1.0 - q), hi = std::pow(x, -M0 + 1.0 - q);
    // Both sides at once: the reported margin is the tighter of the two.
    const double m_lo = relative_margin(ratio, lo, false), m_hi = relative_margin(ratio, hi, true);
    r.times.push_back(s.t[i]);
    r.values.push_back(ratio);
    r.bounds.push_back(m_lo <= m_hi ? lo : hi);
    r.margins.push_back(std::min(m_lo, m_hi));
  }
  r.finalize(tol);
  return r;
}

GammaFamilyReports verify_gamma_family(const TrajectoryLog& log, double gamma, double tol) {
  if (!(gamma >= 1.0)) throw DomainError("estimate: gamma must be at least 1");
  const Series s = series(log);
  GammaFamilyReports out{make_report("gamma-upper", log), make_report("gamma-lower", log), make_report("gamma-denominator", log),
                         make_report("gamma-combined", log)};
  EstimateReport* all[] = {&out.upper, &out.lower, &out.denominator, &out.combined};
  for (EstimateReport* r : all) r->parameters = {{"gamma", gamma}};
  if (!gradient_dominates(s)) {
    for (EstimateReport* r : all) {
      r->vacuous = true;
      r->note = kPremiseNote;
      r->finalize(tol);
    }
    return out;
  }
  const std::size_t n = s.t.size();
  const double w0 = s.omega.front();
  const double t_start = s.t.front();
  std::vector<double> G(n), ep(n), em(n);
  for (std::size_t i = 0; i < n; ++i) {
    G[i] = s.gradint[i] - s.gradint.front();
    ep[i] = std::exp(gamma * G[i]);
    em[i] = std::exp(-gamma * G[i]);
  }
  const std::vector<double> Ip = cumulative_trapezoid(s.t, ep), Im = cumulative_trapezoid(s.t, em);
  const double g1 = gamma - 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = s.t[i];
    out.upper.add(t, s.omega[i], w0 * ep[i] / (1.0 + g1 * w0 * Ip[i]), true);
    const double den = 1.0 - g1 * w0 * Im[i];
    if (den > 0.0) {
      out.lower.add(t, s.omega[i], w0 * em[i] / den, false);
    } else if (!out.lower.suspended_from) {
      out.lower.suspended_from = t;
    }
    out.denominator.add(t, den, std::pow(1.0 + w0 * (t - t_start), -g1), false);
    if (i > 0) {
      // int_0^t cosh(gamma (G(t) - G(tau))) dtau by the trapezoid rule on the logged rows.
      double c = 0.0;
      for (std::size_t j = 1; j <= i; ++j) {
        c += 0.5 * (s.t[j] - s.t[j - 1]) * (std::cosh(gamma * (G[i] - G[j])) + std::cosh(gamma * (G[i] - G[j - 1])));
      }
      out.combined.add(t, std::sinh(gamma * G[i]) / c, g1 * w0, false);
    }
  }
  if (out.lower.suspended_from) out.lower.note = "denominator reaches zero; the floor check covers later times";
  for (EstimateReport* r : all) r->finalize(tol);
  return out;
}

EstimateReport verify_renorm_field_decay(const TrajectoryLog& renorm_log, double c0, double tol) {
  if (renorm_log.empty()) throw DomainError("estimate: empty log");
  const RenormMode mode = parse_renorm_mode(meta_string(renorm_log, "renorm_mode"));
  const double gamma = meta_double(renorm_log, "gamma");
  const std::vector<double> s = renorm_log.times();
  const double s0 = s.front();
  if (mode == RenormMode::self_consistent_enstrophy) {
    const double nu = meta_double(renorm_log, "viscosity");
    if (!(nu > 0.0)) throw DomainError("estimate: the enstrophy decay bound needs positive viscosity");
    const double c = c0 / (nu * nu * nu);
    if (!(gamma > c)) throw DomainError("estimate: the enstrophy decay bound needs gamma > C0");
    EstimateReport r = make_report("renorm-enstrophy-decay", renorm_log);
    r.parameters = {{"gamma", gamma}, {"C0", c0}, {"viscosity", nu}};
    const std::vector<double> ens = renorm_log.column("enstrophy");
    const double w0 = std::sqrt(ens.front());
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double ds = s[i] - s0;
      r.add(s[i], std::sqrt(ens[i]), w0 / std::pow(1.0 + (gamma - c) * ds * std::pow(w0, 4), 0.25), true);
    }
    r.finalize(tol);
    return r;
  }
  if (mode != RenormMode::self_consistent_gradient) {
    throw DomainError("estimate: decay bounds need a self-consistent renormalized run");
  }
  const int sign = std::stoi(meta_string(renorm_log, "sign"));
  EstimateReport r = make_report(sign > 0 ? "renorm-decay-plus" : "renorm-decay-minus", renorm_log);
  r.parameters = {{"gamma", gamma}, {"sign", double(sign)}};
  const Series ser = series(renorm_log);
  const auto drift_norm = renorm_log.meta.find("drift_norm");
  const auto grad_norm = renorm_log.meta.find("grad_norm");
  if (drift_norm == renorm_log.meta.end() || grad_norm == renorm_log.meta.end() ||
      drift_norm->second != grad_norm->second) {
    r.vacuous = true;
    r.note = "logged gradient norm differs from the drift norm; premise not checkable";
    r.finalize(tol);
    return r;
  }
  if (!gradient_dominates(ser)) {
    r.vacuous = true;
    r.note = kPremiseNote;
    r.finalize(tol);
    return r;
  }
  const double w0 = ser.omega.front();
  const double g1 = gamma - 1.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double ds = s[i] - s0;
    if (sign > 0) {
      r.add(s[i], ser.omega[i], w0 / (1.0 + g1 * ds * w0), true);
    } else {
      const double den = 1.0 - g1 * ds * w0;
      if (den <= 0.0) {
        r.suspended_from = s[i];
        break;
      }
      r.add(s[i], ser.omega[i], w0 / den, false);
    }
  }
  r.finalize(tol);
  return r;
}

EnstrophyReports verify_enstrophy_bound(const TrajectoryLog& log, double gamma, double c0, double tol) {
  if (log.empty()) throw DomainError("estimate: empty log");
  const double nu = meta_double(log, "viscosity");
  if (!(nu > 0.0)) throw DomainError("estimate: the enstrophy bound needs positive viscosity");
  const double c = c0 / (nu * nu * nu);
  if (!(gamma >= c)) throw DomainError("estimate: the enstrophy bound needs gamma >= C0 / nu^3");
  EnstrophyReports out{make_report("enstrophy-bound", log), make_report("enstrophy-denominator", log)};
  for (EstimateReport* r : {&out.bound, &out.denominator}) r->parameters = {{"gamma", gamma}, {"C0", c0}, {"viscosity", nu}};
  const std::vector<double> t = log.times();
  const std::vector<double> ens = log.column("enstrophy");
  const std::size_t n = t.size();
  std::vector<double> e2(n);
  for (std::size_t i = 0; i < n; ++i) e2[i] = ens[i] * ens[i];
  const std::vector<double> Q = cumulative_trapezoid(t, e2);
  // exp(gamma Q) overflows for realistic enstrophies, so J = int exp(gamma Q) and the bound are kept as logs.
  auto log_add = [](double a, double b) {
    if (a == -kInfinity) return b;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
  };
  // With ||omega||_2^4 linear between rows (the model behind Q), gamma Q is quadratic on each interval.
  // Trapezoid sums of exp(gamma Q) overshoot badly once gamma ||omega||^4 dt >> 1, so each interval is
  // split into pieces on which the exponent is taken linear and integrated exactly.
  auto log_expm1_ratio = [](double x) {  // log((e^x - 1) / x)
    if (std::abs(x) < 1e-8) return 0.5 * x;
    if (x > 0.0) return x + std::log(-std::expm1(-x)) - std::log(x);
    return std::log(std::expm1(x) / x);
  };
  constexpr int kPieces = 64;
  std::vector<double> log_J(n, -kInfinity);
  for (std::size_t i = 1; i < n; ++i) {
    const double dt = t[i] - t[i - 1];
    const double h = dt / kPieces;
    const double slope = (e2[i] - e2[i - 1]) / dt;
    auto exponent = [&](double tau) { return gamma * (Q[i - 1] + e2[i - 1] * tau + 0.5 * slope * tau * tau); };
    double acc = log_J[i - 1];
    double lo = exponent(0.0);
    for (int k = 1; k <= kPieces; ++k) {
      const double hi = exponent(k * h);
      acc = log_add(acc, lo + std::log(h) + log_expm1_ratio(hi - lo));
      lo = hi;
    }
    log_J[i] = acc;
  }
  const double w04 = ens.front() * ens.front();
  const double log_w0 = 0.5 * std::log(ens.front());
  for (std::size_t i = 0; i < n; ++i) {
    const double log_den = gamma > c && w04 > 0.0 ? log_add(0.0, std::log((gamma - c) * w04) + log_J[i]) : 0.0;
    out.bound.add_log(t[i], 0.5 * std::log(ens[i]), log_w0 + 0.25 * gamma * Q[i] - 0.25 * log_den, true);
    const double base = 1.0 - c * w04 * (t[i] - t.front());
    if (base > 0.0) {
      out.denominator.add_log(t[i], log_den, -(gamma - c) / c * std::log(base), true);
    } else if (!out.denominator.suspended_from) {
      out.denominator.suspended_from = t[i];
    }
  }
  out.bound.finalize(tol);
  out.denominator.finalize(tol);
  return out;
}

EstimateReport verify_ratio_lower_bound(const TrajectoryLog& log, double alpha, double p, double tol) {
  if (!(alpha > -1.0)) throw DomainError("estimate: alpha must exceed -1");
  EstimateReport r = make_report("ratio-lower-bound", log);
  const double q = std::isinf(p) ? 0.0 : 3.0 / ((alpha + 1.0) * p);
  r.parameters = {{"alpha", alpha}, {"p", p}, {"exponent", q - 2.0}, {"contradiction_regime", q - 2.0 > 0.0 ? 1.0 : 0.0}};
  const Series s = series(log);
  const std::vector<double> w = log.column(lp_label(p));
  const double w0 = w.front();
  if (w0 == 0.0) {
    r.vacuous = true;
    r.note = "initial vorticity vanishes";
    r.finalize(tol);
    return r;
  }
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    const double log_mu = s.gradint[i] - s.gradint.front();
    const double ratio = std::exp((q - 1.0) * log_mu) * w[i] / w0;
    r.add(s.t[i], ratio, std::exp((q - 2.0) * log_mu), false);
  }
  r.finalize(tol);
  return r;
}

EstimateReport verify_ratio_lower_bound_renormalized(const TrajectoryLog& renorm_log, double p, double tol) {
  if (renorm_log.empty()) throw DomainError("estimate: empty log");
  if (parse_renorm_mode(meta_string(renorm_log, "renorm_mode")) != RenormMode::self_consistent_gradient ||
      meta_double(renorm_log, "gamma") != 1.0 || std::stoi(meta_string(renorm_log, "sign")) != 1) {
    throw DomainError("estimate: needs a self-consistent gradient run with gamma = 1 and sign +1");
  }
  if (meta_string(renorm_log, "grad_norm") != meta_string(renorm_log, "drift_norm")) {
    throw DomainError("estimate: logged gradient norm differs from the drift norm");
  }
  const double alpha = meta_double(renorm_log, "alpha");
  EstimateReport r = make_report("ratio-lower-bound", renorm_log);
  const double q = std::isinf(p) ? 0.0 : 3.0 / ((alpha + 1.0) * p);
  r.parameters = {{"alpha", alpha}, {"p", p}, {"exponent", q - 2.0}, {"contradiction_regime", q - 2.0 > 0.0 ? 1.0 : 0.0}};
  const Series s = series(renorm_log);
  const std::vector<double> w = renorm_log.column(lp_label(p));
  const double w0 = w.front();
  if (w0 == 0.0) {
    r.vacuous = true;
    r.note = "initial vorticity vanishes";
    r.finalize(tol);
    return r;
  }
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    const double log_mu = s.gradint[i] - s.gradint.front();
    r.add(s.t[i], w[i] / w0, std::exp((q - 2.0) * log_mu), false);
  }
  r.finalize(tol);
  return r;
}

namespace {

double gradient_l2(const SpectralField& f) {
  const GridSpec& g = f.grid;
  double acc = 0.0;
  for_each_mode(g, [&](std::size_t idx, int mx, int my, int mz) {
    const double kx = g.derivative_wavenumber(mx), ky = g.derivative_wavenumber(my), kz = g.derivative_wavenumber(mz);
    const double k2 = kx * kx + ky * ky + kz * kz;
    double a = 0.0;
    for (int d = 0; d < 3; ++d) a += std::norm(f.comp[d][idx]);
    acc += g.parseval_weight(mx) * k2 * a;
  });
  return std::sqrt(acc * g.volume());
}

}  // namespace

C0Calibration calibrate_c0(int samples, int n, std::uint64_t seed) {
  if (samples < 1) throw DomainError("calibration: need at least one sample");
  const GridSpec g{n};
  g.validate();
  const int kmax = g.dealias_cutoff();
  C0Calibration out;
  out.samples = samples;
  out.n = n;
  out.seed = seed;
  out.method =
      "max of ||W||_3 ||grad V||_2 ||W||_6 / (||W||_2^1.5 ||grad W||_2^1.5), W = curl V, over random solenoidal "
      "fields with shell bands [b0, b1] cycling through 1 <= b0 <= b1 <= cutoff; C0 = 27 C^4 / 64";
  for (int i = 0; i < samples; ++i) {
    const int b1 = 1 + i % kmax;
    const int b0 = 1 + (i / kmax) % b1;
    const SpectralField v = random_solenoidal(g, {seed + static_cast<std::uint64_t>(i), b0, b1, 1.0});
    const SpectralField w = curl(v);
    const PhysicalField wp = to_physical(w);
    const double w2 = lp_norm(wp, 2.0), w3 = lp_norm(wp, 3.0), w6 = lp_norm(wp, 6.0);
    const double dv = gradient_l2(v), dw = gradient_l2(w);
    if (w2 == 0.0 || dw == 0.0) continue;
    out.C = std::max(out.C, w3 * dv * w6 / (std::pow(w2, 1.5) * std::pow(dw, 1.5)));
  }
  out.C0 = 27.0 * std::pow(out.C, 4) / 64.0;
  out.adopted = std::max(out.C0, 1.0);
  return out;
}

}  // namespace bulb
