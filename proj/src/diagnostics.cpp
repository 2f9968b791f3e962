#include "bulb/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bulb/errors.hpp"
#include "bulb/point_eval.hpp"
#include "bulb/spectral.hpp"

namespace bulb {

std::string to_string(GradNorm g) {
  switch (g) {
    case GradNorm::frobenius: return "frobenius";
    case GradNorm::max_row_sum: return "max_row_sum";
    case GradNorm::entry_sum: return "entry_sum";
  }
  return "frobenius";
}

GradNorm parse_grad_norm(const std::string& s) {
  if (s == "frobenius") return GradNorm::frobenius;
  if (s == "max_row_sum") return GradNorm::max_row_sum;
  if (s == "entry_sum") return GradNorm::entry_sum;
  throw DomainError("unknown gradient norm convention '" + s + "'");
}

double matrix_norm(const Mat3& m, GradNorm convention) {
  switch (convention) {
    case GradNorm::frobenius: {
      double s = 0.0;
      for (const auto& row : m)
        for (double v : row) s += v * v;
      return std::sqrt(s);
    }
    case GradNorm::max_row_sum: {
      double best = 0.0;
      for (const auto& row : m) best = std::max(best, std::abs(row[0]) + std::abs(row[1]) + std::abs(row[2]));
      return best;
    }
    case GradNorm::entry_sum: {
      double s = 0.0;
      for (const auto& row : m)
        for (double v : row) s += std::abs(v);
      return s;
    }
  }
  return 0.0;
}

namespace {

double lp_from_magnitudes(const std::vector<double>& mag, double p, double cell) {
  if (!(p > 0.0)) throw DomainError("lp_norm: p must be positive");
  if (std::isinf(p)) return mag.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
  double sum = 0.0;
  if (p == 2.0) {
    for (double m : mag) sum += m * m;
    return std::sqrt(sum * cell);
  }
  for (double m : mag) sum += std::pow(m, p);
  return std::pow(sum * cell, 1.0 / p);
}

std::vector<double> magnitudes(const PhysicalField& f) {
  std::vector<double> mag(f.grid.points());
  for (std::size_t i = 0; i < mag.size(); ++i) {
    mag[i] = std::sqrt(f.comp[0][i] * f.comp[0][i] + f.comp[1][i] * f.comp[1][i] + f.comp[2][i] * f.comp[2][i]);
  }
  return mag;
}

Vec3 lattice_point(const GridSpec& g, std::size_t idx) {
  const std::size_t n = g.n;
  const double h = g.spacing();
  return {double(idx % n) * h, double((idx / n) % n) * h, double(idx / (n * n)) * h};
}

}  // namespace

double lp_norm(const PhysicalField& f, double p) {
  return lp_from_magnitudes(magnitudes(f), p, f.grid.cell_volume());
}

double lp_norm(const ScalarLattice& f, double p) {
  std::vector<double> mag(f.values.size());
  std::transform(f.values.begin(), f.values.end(), mag.begin(), [](double v) { return std::abs(v); });
  return lp_from_magnitudes(mag, p, f.grid.cell_volume());
}

GradSup grad_sup(const SpectralField& v, GradNorm convention, SupMethod method) {
  const GridSpec& g = v.grid;
  const PhysicalTensor t = to_physical(gradient(v));
  std::vector<double> norms(g.points());
  for (std::size_t idx = 0; idx < norms.size(); ++idx) {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m[i][j] = t.comp[i][j][idx];
    norms[idx] = matrix_norm(m, convention);
  }
  const std::size_t best = static_cast<std::size_t>(std::max_element(norms.begin(), norms.end()) - norms.begin());
  GradSup result{norms[best], lattice_point(g, best)};
  if (method == SupMethod::lattice || result.value == 0.0) return result;

  // Polish the strongest lattice candidates; the true max may sit between nodes.
  std::vector<std::size_t> order(norms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t candidates = std::min<std::size_t>(8, order.size());
  std::partial_sort(order.begin(), order.begin() + candidates, order.end(),
                    [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });
  const PointEvaluator eval(v);
  auto objective = [&](const Vec3& x) { return matrix_norm(eval.sample(x).gradient, convention); };
  const double h = g.spacing();
  for (std::size_t c = 0; c < candidates; ++c) {
    Vec3 x = lattice_point(g, order[c]);
    double fx = objective(x);
    double step = 0.5 * h;
    while (step > 1e-7 * h) {
      bool moved = false;
      for (int axis = 0; axis < 3 && !moved; ++axis) {
        for (double sgn : {1.0, -1.0}) {
          Vec3 y = x;
          y[axis] += sgn * step;
          const double fy = objective(y);
          if (fy > fx) {
            x = y;
            fx = fy;
            moved = true;
            break;
          }
        }
      }
      if (!moved) step *= 0.5;
    }
    if (fx > result.value) result = {fx, x};
  }
  return result;
}

LogRow measure(const SpectralField& v, double t, const DiagnosticsOptions& opts) {
  const SpectralField w = curl(v);
  const PhysicalField w_phys = to_physical(w);
  const std::vector<double> mag = magnitudes(w_phys);
  LogRow r;
  r.t = t;
  r.energy = 0.5 * box_inner(v, v);
  r.enstrophy = box_inner(w, w);
  r.grad_sup = grad_sup(v, opts.convention).value;
  r.omega_sup = mag.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
  for (double p : opts.p_list) r.omega_lp.push_back(lp_from_magnitudes(mag, p, v.grid.cell_volume()));
  r.tail_fraction = spectral_tail_fraction(v, opts.tail_band_start);
  return r;
}

std::string to_string(BlowupClass c) {
  switch (c) {
    case BlowupClass::no_blowup: return "no_blowup";
    case BlowupClass::type_I: return "type_I";
    case BlowupClass::type_II: return "type_II";
    case BlowupClass::undetermined: return "undetermined";
  }
  return "undetermined";
}

namespace {

struct PowerFit {
  double log_c = 0.0;
  double kappa = 0.0;
  double residual = 0.0;
};

// Least squares for log g = log C - kappa log(T - t) at fixed T.
PowerFit fit_at(const std::vector<double>& t, const std::vector<double>& log_g, double T) {
  const std::size_t m = t.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = std::log(T - t[i]);
    sx += x[i];
    sy += log_g[i];
    sxx += x[i] * x[i];
    sxy += x[i] * log_g[i];
  }
  const double denom = m * sxx - sx * sx;
  PowerFit f;
  const double slope = denom > 0 ? (m * sxy - sx * sy) / denom : 0.0;
  f.log_c = (sy - slope * sx) / m;
  f.kappa = -slope;
  double res = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double e = log_g[i] - f.log_c - slope * x[i];
    res += e * e;
  }
  f.residual = std::sqrt(res / m);
  return f;
}

}  // namespace

BlowupAssessment estimate_blowup(const TrajectoryLog& log, const BlowupOptions& opts) {
  BlowupAssessment a;
  const std::size_t n = log.size();
  if (n < opts.min_rows) {
    a.note = "too few rows";
    return a;
  }
  const std::size_t rows =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(opts.tail_fraction * n)), opts.min_rows, n);
  a.window_begin = n - rows;
  a.window_rows = rows;
  std::vector<double> t, g;
  for (std::size_t i = a.window_begin; i < n; ++i) {
    t.push_back(log[i].t);
    g.push_back(log[i].grad_sup);
  }
  const auto [gmin, gmax] = std::minmax_element(g.begin(), g.end());
  if (*gmax - *gmin <= 1e-9 * std::max(1e-300, *gmax)) {
    a.classification = BlowupClass::no_blowup;
    a.note = "flat tail";
    return a;
  }
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (g[i] < g[i - 1] * (1.0 - 1e-12) || g[i - 1] <= 0.0) {
      a.note = "non-monotone tail";
      return a;
    }
  }
  std::vector<double> log_g(g.size());
  std::transform(g.begin(), g.end(), log_g.begin(), [](double v) { return std::log(v); });

  // One-dimensional search over u = log(T - t_last); C and kappa follow by linear least squares.
  const double t_last = t.back();
  const double span = std::max(log.back().t - log[0].t, 1e-300);
  const double u_lo = std::log(1e-9 * span), u_hi = std::log(1e3 * span);
  auto residual = [&](double u) { return fit_at(t, log_g, t_last + std::exp(u)).residual; };
  const int samples = 400;
  int best_i = 0;
  double best_r = residual(u_lo);
  for (int i = 1; i <= samples; ++i) {
    const double r = residual(u_lo + (u_hi - u_lo) * i / samples);
    if (r < best_r) {
      best_r = r;
      best_i = i;
    }
  }
  const double du = (u_hi - u_lo) / samples;
  double lo = u_lo + du * std::max(0, best_i - 1), hi = u_lo + du * std::min(samples, best_i + 1);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
  double fc = residual(c), fd = residual(d);
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - phi * (hi - lo);
      fc = residual(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + phi * (hi - lo);
      fd = residual(d);
    }
  }
  const double u = 0.5 * (lo + hi);
  const double T = t_last + std::exp(u);
  const PowerFit fit = fit_at(t, log_g, T);
  a.T_est = T;
  a.kappa = fit.kappa;
  a.C = std::exp(fit.log_c);
  a.residual = fit.residual;

  if (T - t_last > 10.0 * span) {
    a.classification = BlowupClass::no_blowup;
    a.M_est = 0.0;
    a.note = "fitted singular time far beyond the horizon";
  } else if (a.kappa < 1.0 - opts.kappa_tolerance) {
    a.classification = BlowupClass::no_blowup;
    a.M_est = 0.0;
    a.note = "sub-power-law growth";
  } else if (a.kappa <= 1.0 + opts.kappa_tolerance) {
    a.M_est = a.C;
    a.classification = a.C >= 1.0 - opts.fit_tolerance ? BlowupClass::type_I : BlowupClass::no_blowup;
    if (a.classification == BlowupClass::no_blowup) a.note = "rate-one fit with M below one";
  } else {
    a.M_est = kInfinity;
    a.classification = BlowupClass::type_II;
  }
  return a;
}

double bkm_integral(const TrajectoryLog& log, double t) {
  if (log.empty()) throw DomainError("bkm_integral: empty log");
  const auto ts = log.times();
  if (t > ts.back() + 1e-12 * std::max(1.0, std::abs(ts.back()))) {
    throw DomainError("bkm_integral: t beyond log coverage");
  }
  return trapezoid_to(ts, log.column("omega_sup"), t);
}

}  // namespace bulb
