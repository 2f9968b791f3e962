#include "bulb/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bulb/diagnostics.hpp"
#include "bulb/point_eval.hpp"
#include "bulb/spectral.hpp"

namespace bulb {

std::string to_string(MuFamily f) {
  switch (f) {
    case MuFamily::constant: return "constant";
    case MuFamily::power_law: return "power_law";
    case MuFamily::exp_gradient: return "exp_gradient";
    case MuFamily::exp_enstrophy: return "exp_enstrophy";
  }
  return "constant";
}

MuFamily parse_mu_family(const std::string& s) {
  if (s == "constant") return MuFamily::constant;
  if (s == "power_law") return MuFamily::power_law;
  if (s == "exp_gradient") return MuFamily::exp_gradient;
  if (s == "exp_enstrophy") return MuFamily::exp_enstrophy;
  throw DomainError("unknown mu family '" + s + "'");
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > -1.0) || !std::isfinite(alpha)) throw DomainError("similarity: alpha must exceed -1");
}

}  // namespace

SimilarityMap SimilarityMap::constant(double alpha) {
  check_alpha(alpha);
  SimilarityMap m;
  m.alpha_ = alpha;
  return m;
}

SimilarityMap SimilarityMap::power_law(double alpha, double T, double gamma) {
  check_alpha(alpha);
  if (!(T > 0.0)) throw DomainError("similarity: power law needs T > 0");
  if (!(gamma >= 1.0)) throw DomainError("similarity: power law needs gamma >= 1");
  SimilarityMap m;
  m.alpha_ = alpha;
  m.params_ = {MuFamily::power_law, T, gamma, 1};
  return m;
}

SimilarityMap SimilarityMap::exp_gradient(double alpha, double gamma, int sign, const TrajectoryLog& log) {
  check_alpha(alpha);
  if (!(gamma >= 1.0)) throw DomainError("similarity: exp_gradient needs gamma >= 1");
  if (sign != 1 && sign != -1) throw DomainError("similarity: sign must be +1 or -1");
  if (log.empty()) throw DomainError("similarity: empty log");
  SimilarityMap m;
  m.alpha_ = alpha;
  m.params_ = {MuFamily::exp_gradient, 0.0, gamma, sign};
  m.t_ = log.times();
  const auto grad = log.column("grad_sup");
  const auto integral = cumulative_trapezoid(m.t_, grad);
  for (std::size_t i = 0; i < m.t_.size(); ++i) {
    m.log_mu_.push_back(sign * gamma * integral[i]);
    m.rate_.push_back(sign * gamma * grad[i]);
  }
  m.mu_.resize(m.t_.size());
  std::transform(m.log_mu_.begin(), m.log_mu_.end(), m.mu_.begin(), [](double l) { return std::exp(l); });
  m.s_ = cumulative_trapezoid(m.t_, m.mu_);
  for (std::size_t i = 1; i < m.t_.size(); ++i) m.quad_step_ = std::max(m.quad_step_, m.t_[i] - m.t_[i - 1]);
  return m;
}

SimilarityMap SimilarityMap::exp_enstrophy(double alpha, double gamma, const TrajectoryLog& log) {
  check_alpha(alpha);
  if (!(gamma > 0.0)) throw DomainError("similarity: exp_enstrophy needs gamma > 0");
  if (log.empty()) throw DomainError("similarity: empty log");
  SimilarityMap m;
  m.alpha_ = alpha;
  m.params_ = {MuFamily::exp_enstrophy, 0.0, gamma, 1};
  m.t_ = log.times();
  auto ens = log.column("enstrophy");
  std::vector<double> quartic(ens.size());
  std::transform(ens.begin(), ens.end(), quartic.begin(), [](double e) { return e * e; });
  const auto integral = cumulative_trapezoid(m.t_, quartic);
  for (std::size_t i = 0; i < m.t_.size(); ++i) {
    m.log_mu_.push_back(gamma * integral[i]);
    m.rate_.push_back(gamma * quartic[i]);
  }
  m.mu_.resize(m.t_.size());
  std::transform(m.log_mu_.begin(), m.log_mu_.end(), m.mu_.begin(), [](double l) { return std::exp(l); });
  m.s_ = cumulative_trapezoid(m.t_, m.mu_);
  for (std::size_t i = 1; i < m.t_.size(); ++i) m.quad_step_ = std::max(m.quad_step_, m.t_[i] - m.t_[i - 1]);
  return m;
}

SimilarityMap SimilarityMap::from_params(double alpha, const MuParams& p, const TrajectoryLog* log) {
  switch (p.family) {
    case MuFamily::constant: return constant(alpha);
    case MuFamily::power_law: return power_law(alpha, p.T, p.gamma);
    case MuFamily::exp_gradient:
      if (!log) throw DomainError("similarity: exp_gradient needs a trajectory log");
      return exp_gradient(alpha, p.gamma, p.sign, *log);
    case MuFamily::exp_enstrophy:
      if (!log) throw DomainError("similarity: exp_enstrophy needs a trajectory log");
      return exp_enstrophy(alpha, p.gamma, *log);
  }
  return constant(alpha);
}

double SimilarityMap::t_max() const {
  switch (params_.family) {
    case MuFamily::constant: return kInfinity;
    case MuFamily::power_law: return params_.T;
    default: return t_.back();
  }
}

void SimilarityMap::check_t(double t) const {
  const double t0 = t_.empty() ? 0.0 : t_.front();
  if (!(t >= t0) && !(t_.empty() && t >= 0.0)) throw DomainError("similarity: t precedes the schedule");
  switch (params_.family) {
    case MuFamily::constant: return;
    case MuFamily::power_law:
      if (!(t < params_.T)) throw DomainError("similarity: power law requires t < T");
      return;
    default: {
      const double slack = 1e-12 * std::max(1.0, std::abs(t_.back()));
      if (t > t_.back() + slack) throw DomainError("similarity: t beyond log coverage");
    }
  }
}

double SimilarityMap::log_mu(double t) const {
  check_t(t);
  switch (params_.family) {
    case MuFamily::constant: return 0.0;
    case MuFamily::power_law: return -params_.gamma * std::log(params_.T - t);
    default: return interpolate(t_, log_mu_, t);
  }
}

double SimilarityMap::mu(double t) const { return std::exp(log_mu(t)); }

double SimilarityMap::s_of_t(double t) const {
  check_t(t);
  switch (params_.family) {
    case MuFamily::constant: return t;
    case MuFamily::power_law: {
      const double T = params_.T, g = params_.gamma;
      const double ratio_log = -std::log1p(-t / T);  // log(T / (T - t))
      if (g == 1.0) return ratio_log;
      return std::expm1((g - 1.0) * ratio_log) / ((g - 1.0) * std::pow(T, g - 1.0));
    }
    default: return trapezoid_to(t_, mu_, t);
  }
}

double SimilarityMap::t_of_s(double s) const {
  if (!(s >= 0.0)) throw DomainError("similarity: s must be >= 0");
  if (params_.family == MuFamily::constant) return s;
  double lo = t_.empty() ? 0.0 : t_.front();
  double hi;
  if (params_.family == MuFamily::power_law) {
    hi = params_.T;
  } else {
    hi = t_.back();
    if (s > s_.back() * (1.0 + 1e-14) + 1e-300) throw DomainError("similarity: s beyond log coverage");
  }
  // Monotone bisection; the power-law upper end is open, so nextafter keeps it inside the domain.
  if (params_.family == MuFamily::power_law) hi = std::nextafter(hi, 0.0);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (s_of_t(mid) < s) lo = mid;
    else hi = mid;
  }
  return std::abs(s_of_t(lo) - s) <= std::abs(s_of_t(hi) - s) ? lo : hi;
}

double SimilarityMap::drift_coefficient(double t) const {
  check_t(t);
  switch (params_.family) {
    case MuFamily::constant: return 0.0;
    case MuFamily::power_law: return params_.gamma * std::pow(params_.T - t, params_.gamma - 1.0);
    default: return interpolate(t_, rate_, t) / mu(t);
  }
}

double SimilarityMap::g_of_s(double s) const {
  if (params_.family != MuFamily::power_law) throw DomainError("similarity: g(s) is defined for the power law");
  const double g = params_.gamma;
  return g / (s * (g - 1.0) + std::pow(params_.T, 1.0 - g));
}

namespace {

std::string window_message(double requested, double max_radius) {
  std::ostringstream os;
  os.precision(17);
  os << "window radius " << requested << " exceeds the maximal admissible radius " << max_radius;
  return os.str();
}

}  // namespace

WindowError::WindowError(double requested, double max_radius)
    : DomainError(window_message(requested, max_radius)), max_radius_(max_radius) {}

double max_window_radius(const GridSpec& grid, const SimilarityMap& map, double t) {
  return 0.5 * grid.domain_length * map.space_factor(t);
}

WindowField push_snapshot(const SpectralField& v, double t, const SimilarityMap& map, double radius, int n_window) {
  const double r_max = max_window_radius(v.grid, map, t);
  if (radius <= 0.0) radius = r_max;
  if (radius > r_max * (1.0 + 1e-12)) throw WindowError(radius, r_max);
  const int n = n_window > 0 ? n_window : v.grid.n;
  GridSpec wg{n, 2.0 * radius, v.grid.dealias_fraction};
  wg.validate();

  const double a = map.alpha();
  const double c = map.space_factor(t);
  const double mu = map.mu(t);
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = wg.coordinate(i) / c;
  auto vals = evaluate_on_tensor_grid(v, xs, xs, xs);
  const double amp = std::pow(mu, -a / (a + 1.0));
  PhysicalField p{wg, {}};
  for (int d = 0; d < 3; ++d) {
    for (double& x : vals[d]) x *= amp;
    p.comp[d] = std::move(vals[d]);
  }
  WindowField w;
  w.field = to_spectral(p);
  w.radius = radius;
  w.t = t;
  w.s = map.s_of_t(t);
  w.alpha = a;
  w.mu = mu;
  return w;
}

std::vector<Vec3> pull_points(const WindowField& w, const SimilarityMap& map, std::span<const Vec3> points) {
  const double a = map.alpha();
  const double c = map.space_factor(w.t);
  const double amp = std::pow(map.mu(w.t), a / (a + 1.0));
  const PointEvaluator eval(w.field);
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const Vec3& x : points) {
    Vec3 y{c * x[0], c * x[1], c * x[2]};
    for (double yi : y)
      if (std::abs(yi) > w.radius * (1.0 + 1e-12)) throw WindowError(std::abs(yi), w.radius);
    Vec3 v = eval.value(y);
    for (double& vi : v) vi *= amp;
    out.push_back(v);
  }
  return out;
}

SpectralField pull_snapshot(const WindowField& w, const SimilarityMap& map, const GridSpec& grid) {
  const double r_max = max_window_radius(grid, map, w.t);
  if (std::abs(w.radius - r_max) > 1e-12 * r_max) {
    throw DomainError("pull_snapshot: the full-box inverse needs the maximal window");
  }
  const double a = map.alpha();
  const double c = map.space_factor(w.t);
  const double amp = std::pow(map.mu(w.t), a / (a + 1.0));
  std::vector<double> ys(grid.n);
  for (int i = 0; i < grid.n; ++i) ys[i] = c * grid.coordinate(i);
  auto vals = evaluate_on_tensor_grid(w.field, ys, ys, ys);
  PhysicalField p{grid, {}};
  for (int d = 0; d < 3; ++d) {
    for (double& x : vals[d]) x *= amp;
    p.comp[d] = std::move(vals[d]);
  }
  return to_spectral(p);
}

TrajectoryLog renormalize_log(const TrajectoryLog& log, const SimilarityMap& map) {
  const double a = map.alpha();
  TrajectoryLog out(log.p_list());
  out.meta = log.meta;
  out.meta["frame"] = "renormalized";
  out.meta["alpha"] = format_double(a);
  out.meta["mu_family"] = to_string(map.family());
  out.meta["gamma"] = format_double(map.params().gamma);
  out.meta["sign"] = std::to_string(map.params().sign);
  if (map.family() == MuFamily::power_law) out.meta["T"] = format_double(map.params().T);
  for (const LogRow& r : log.rows()) {
    const double lm = map.log_mu(r.t);
    LogRow q;
    q.t = map.s_of_t(r.t);
    q.energy = std::exp(lm * (3.0 - 2.0 * a) / (a + 1.0)) * r.energy;
    q.enstrophy = std::exp(lm * (3.0 / (a + 1.0) - 2.0)) * r.enstrophy;
    q.grad_sup = std::exp(-lm) * r.grad_sup;
    q.omega_sup = std::exp(-lm) * r.omega_sup;
    for (std::size_t i = 0; i < log.p_list().size(); ++i) {
      const double p = log.p_list()[i];
      const double expo = std::isinf(p) ? -1.0 : -1.0 + 3.0 / ((a + 1.0) * p);
      q.omega_lp.push_back(std::exp(lm * expo) * r.omega_lp[i]);
    }
    q.tail_fraction = r.tail_fraction;
    out.append(std::move(q));
  }
  return out;
}

BkmInvariantReport bkm_invariant_check(const TrajectoryLog& log, const TrajectoryLog& renorm_log) {
  auto meta = [&](const char* key) {
    auto it = renorm_log.meta.find(key);
    if (it == renorm_log.meta.end()) throw DomainError(std::string("bkm check: renormalized log lacks ") + key);
    return it->second;
  };
  if (meta("renorm_mode") != "self_consistent_gradient") {
    throw DomainError("bkm check: the renormalized log is not a self-consistent gradient run");
  }
  if (auto it = renorm_log.meta.find("drift_norm"); it != renorm_log.meta.end()) {
    if (it->second != meta("grad_norm")) throw DomainError("bkm check: drift and logged norm conventions differ");
  }
  const double gamma = std::stod(meta("gamma"));
  const int sign = std::stoi(meta("sign"));
  if (log.empty() || renorm_log.empty()) throw DomainError("bkm check: empty log");
  if (log[0].t != 0.0 || renorm_log[0].t != 0.0) throw DomainError("bkm check: logs must start at time zero");

  const auto s = renorm_log.times();
  const auto grad_v = renorm_log.column("grad_sup");
  const auto g_int = cumulative_trapezoid(s, grad_v);
  std::vector<double> inv_mu(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) inv_mu[i] = std::exp(-sign * gamma * g_int[i]);
  const auto t_of_s = cumulative_trapezoid(s, inv_mu);

  const auto t = log.times();
  BkmInvariantReport rep;
  rep.t_cover = std::min(t.back(), t_of_s.back());
  if (!(rep.t_cover > 0.0)) throw DomainError("bkm check: logs do not overlap");
  rep.s_cover = interpolate(t_of_s, s, rep.t_cover);
  rep.physical_integral = trapezoid_to(t, log.column("grad_sup"), rep.t_cover);
  rep.renormalized_integral = trapezoid_to(s, grad_v, rep.s_cover);
  const double scale = std::max(std::abs(rep.physical_integral), std::abs(rep.renormalized_integral));
  rep.relative_difference = scale > 0.0 ? std::abs(rep.physical_integral - rep.renormalized_integral) / scale : 0.0;
  return rep;
}

MaximalS maximal_s(const SimilarityMap& map, const TrajectoryLog& log) {
  if (log.empty()) throw DomainError("maximal_s: empty log");
  MaximalS out;
  out.t_covered = std::min(log.back().t, map.t_max());
  out.value = map.s_of_t(out.t_covered);
  const BlowupAssessment a = estimate_blowup(log);
  out.lower_bound = !(a.T_est && *a.T_est <= log.back().t);
  return out;
}

}  // namespace bulb
