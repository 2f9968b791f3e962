#include "bulb/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "bulb/errors.hpp"
#include "bulb/point_eval.hpp"
#include "bulb/spectral.hpp"

namespace bulb {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::synthesized: return "synthesized";
    case Provenance::run_limit: return "run_limit";
    case Provenance::external: return "external";
  }
  return "external";
}

Provenance parse_provenance(const std::string& s) {
  if (s == "synthesized") return Provenance::synthesized;
  if (s == "run_limit") return Provenance::run_limit;
  if (s == "external") return Provenance::external;
  throw DomainError("unknown provenance '" + s + "'");
}

void ProfileCandidate::validate(double tol) const {
  const SpectralField& f = window.field;
  for (const auto& c : f.comp)
    for (const Complex& z : c)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("profile: non-finite coefficients");
  const double scale = f.max_abs() * f.grid.wavenumber_unit() * f.grid.n;
  if (max_divergence(f) > tol * std::max(scale, 1e-300)) throw DomainError("profile: candidate is not divergence-free");
  if (!(window.radius > 0.0)) throw DomainError("profile: window radius must be positive");
}

WindowField gaussian_vortex_template(int n, double radius, double width, std::uint64_t seed, int blobs) {
  if (!(width > 0.0) || !(radius > 0.0) || blobs < 1) throw DomainError("template: bad width, radius or blob count");
  const GridSpec g{n, 2.0 * radius};
  g.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-radius / 8.0, radius / 8.0);
  std::normal_distribution<double> amp(0.0, 1.0);
  struct Blob {
    Vec3 c, a;
  };
  std::vector<Blob> bs(blobs);
  for (Blob& b : bs) {
    for (int d = 0; d < 3; ++d) b.c[d] = pos(rng);
    for (int d = 0; d < 3; ++d) b.a[d] = amp(rng);
  }
  PhysicalField a = PhysicalField::zeros(g);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Vec3 y{g.coordinate(i), g.coordinate(j), g.coordinate(k)};
        const std::size_t idx = g.physical_index(i, j, k);
        for (const Blob& b : bs) {
          double r2 = 0.0;
          for (int d = 0; d < 3; ++d) r2 += (y[d] - b.c[d]) * (y[d] - b.c[d]);
          const double e = std::exp(-r2 / (width * width));
          for (int d = 0; d < 3; ++d) a.comp[d][idx] += b.a[d] * e;
        }
      }
  WindowField w;
  w.field = curl(to_spectral(a));
  w.radius = radius;
  return w;
}

SpectralField synthesize_selfsimilar(const WindowField& profile, double alpha, double T, double t, const GridSpec& grid) {
  if (!(alpha > -1.0)) throw DomainError("synthesize: alpha must exceed -1");
  if (!(t < T)) throw DomainError("synthesize: t must be before T");
  grid.validate();
  const double tau = T - t;
  const double ell = std::pow(tau, 1.0 / (alpha + 1.0));
  if (ell * profile.radius > 0.5 * grid.domain_length * (1.0 + 1e-12)) {
    throw DomainError("synthesize: the scaled window does not fit in the box (support escape)");
  }
  const int n = grid.n;
  // Lattice points whose preimage lies in the window; the rest stay zero.
  std::vector<int> inside;
  std::vector<double> ys;
  for (int i = 0; i < n; ++i) {
    const double y = grid.coordinate(i) / ell;
    if (y >= -profile.radius && y < profile.radius) {
      inside.push_back(i);
      ys.push_back(y);
    }
  }
  auto vals = evaluate_on_tensor_grid(profile.field, ys, ys, ys);
  const double amp = std::pow(tau, -alpha / (alpha + 1.0));
  const std::size_t m = inside.size();
  PhysicalField p = PhysicalField::zeros(grid);
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t a = 0; a < m; ++a) {
        const std::size_t src = (c * m + b) * m + a;
        const std::size_t dst = grid.physical_index(inside[a], inside[b], inside[c]);
        for (int d = 0; d < 3; ++d) p.comp[d][dst] = amp * vals[d][src];
      }
  return leray_project(to_spectral(p));
}

double window_lp_norm(const PhysicalField& f, double p, double r) {
  if (!(p > 0.0)) throw DomainError("window norm: p must be positive");
  const GridSpec& g = f.grid;
  const int n = g.n;
  const double r2 = r * r;
  double acc = 0.0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double yx = g.coordinate(i), yy = g.coordinate(j), yz = g.coordinate(k);
        if (!std::isinf(r) && yx * yx + yy * yy + yz * yz >= r2) continue;
        const std::size_t idx = g.physical_index(i, j, k);
        const double m = std::sqrt(f.comp[0][idx] * f.comp[0][idx] + f.comp[1][idx] * f.comp[1][idx] +
                                   f.comp[2][idx] * f.comp[2][idx]);
        acc = std::isinf(p) ? std::max(acc, m) : acc + std::pow(m, p);
      }
  return std::isinf(p) ? acc : std::pow(acc * g.cell_volume(), 1.0 / p);
}

std::string to_string(ProfileVerdict v) {
  switch (v) {
    case ProfileVerdict::converging: return "converging";
    case ProfileVerdict::stalling: return "stalling";
    case ProfileVerdict::diverging: return "diverging";
    case ProfileVerdict::vanishing: return "diverging-to-zero";
  }
  return "stalling";
}

WindowSchedule type2_window(double alpha, double gamma, double T) {
  if (!(gamma > 1.0) || !(T > 0.0) || !(alpha > -1.0)) throw DomainError("window schedule: need gamma > 1, T > 0");
  return [=](double s) {
    return std::pow((gamma - 1.0) * s + std::pow(T, 1.0 - gamma), gamma / ((alpha + 1.0) * (gamma - 1.0)));
  };
}

namespace {

/// Least-squares slope of log(values) against the index, sign flipped so decay is positive.
double log_decay_rate(const std::vector<double>& values, double floor) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = double(i), y = std::log(std::max(values[i], floor));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  return -(n * sxy - sx * sy) / den;
}

PhysicalField difference(const PhysicalField& a, const PhysicalField& b) {
  PhysicalField d = a;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < d.comp[c].size(); ++i) d.comp[c][i] -= b.comp[c][i];
  return d;
}

}  // namespace

ConvergenceReport profile_convergence_test(const std::vector<WindowField>& snapshots, const ConvergenceOptions& opts) {
  if (snapshots.size() < 3) throw DomainError("convergence test: need at least three snapshots");
  const WindowField& first = snapshots.front();
  for (const WindowField& w : snapshots) {
    if (!w.field.grid.same_lattice(first.field.grid) || w.radius != first.radius) {
      throw DomainError("convergence test: snapshots are on mismatched lattices");
    }
  }
  ConvergenceReport r;
  r.p = opts.p;
  std::vector<PhysicalField> phi;
  for (const WindowField& w : snapshots) {
    r.s.push_back(w.s);
    phi.push_back(to_physical(opts.vorticity ? curl(w.field) : w.field));
  }
  auto radius_at = [&](std::size_t i) {
    return opts.radius ? opts.radius(snapshots[i].s) : std::numeric_limits<double>::infinity();
  };
  for (std::size_t i = 0; i < phi.size(); ++i) r.norms.push_back(window_lp_norm(phi[i], opts.p, radius_at(i)));
  for (std::size_t i = 0; i + 1 < phi.size(); ++i) {
    const double rad = std::min(radius_at(i), radius_at(i + 1));
    r.radii.push_back(rad);
    r.differences.push_back(window_lp_norm(difference(phi[i + 1], phi[i]), opts.p, rad));
  }
  const double scale = *std::max_element(r.norms.begin(), r.norms.end());
  const double floor = std::max(scale, 1e-300) * 1e-300;
  r.rate = log_decay_rate(r.differences, floor);
  r.norm_rate = log_decay_rate(r.norms, floor);

  const double max_d = *std::max_element(r.differences.begin(), r.differences.end());
  int down = 0, up = 0;
  for (std::size_t i = 0; i + 1 < r.differences.size(); ++i) {
    if (r.differences[i + 1] < r.differences[i]) ++down;
    if (r.differences[i + 1] > r.differences[i]) ++up;
  }
  const int steps = std::max<int>(1, int(r.differences.size()) - 1);
  const bool zero_limit = r.norms.back() <= 1e-12 * scale || (r.rate > 0.0 && r.norm_rate >= 0.5 * r.rate);
  if (scale == 0.0 || max_d <= 1e-10 * scale) {
    r.verdict = scale == 0.0 ? ProfileVerdict::vanishing : ProfileVerdict::converging;
    r.note = scale == 0.0 ? "all snapshots vanish" : "snapshots agree to round-off";
  } else if (r.rate > 0.05 && 3 * down >= 2 * steps) {
    r.verdict = zero_limit ? ProfileVerdict::vanishing : ProfileVerdict::converging;
    if (zero_limit) r.note = "the sequence decays to the zero field; no nonzero profile";
  } else if (r.rate < -0.05 && 3 * up >= 2 * steps) {
    r.verdict = ProfileVerdict::diverging;
  } else {
    r.verdict = ProfileVerdict::stalling;
  }

  const WindowField& last = snapshots.back();
  r.candidate.window = last;
  r.candidate.alpha = last.alpha;
  r.candidate.p = opts.p;
  r.candidate.provenance = Provenance::run_limit;
  return r;
}

namespace {

// Derivatives of the bump (1 - u^2)^16 on |u| < 1.
constexpr int kBumpPower = 16;

std::array<double, 4> bump(double u) {
  if (std::abs(u) >= 1.0) return {0.0, 0.0, 0.0, 0.0};
  const double k = kBumpPower;
  const double w = 1.0 - u * u;
  const double w3 = std::pow(w, k - 3.0), w2 = w3 * w, w1 = w2 * w, w0 = w1 * w;
  return {w0, -2.0 * k * u * w1, -2.0 * k * w1 + 4.0 * k * (k - 1.0) * u * u * w2,
          12.0 * k * (k - 1.0) * u * w2 - 8.0 * k * (k - 1.0) * (k - 2.0) * u * u * u * w3};
}

}  // namespace

bool TestFunction::inside(const Vec3& y) const {
  for (int d = 0; d < 3; ++d)
    if (std::abs(y[d] - centre[d]) >= radius) return false;
  return true;
}

TestFunction::Sample TestFunction::sample(const Vec3& y) const {
  Sample s;
  if (!inside(y)) return s;
  std::array<std::array<double, 4>, 3> b;
  for (int d = 0; d < 3; ++d) {
    b[d] = bump((y[d] - centre[d]) / radius);
    for (int o = 1; o < 4; ++o) b[d][o] /= std::pow(radius, o);
  }
  // D(o) = prod_d b[d][o[d]]
  auto D = [&](int ox, int oy, int oz) { return b[0][ox] * b[1][oy] * b[2][oz]; };
  auto unit = [](int i, int j = -1, int k = -1) {
    std::array<int, 3> o{0, 0, 0};
    for (int a : {i, j, k})
      if (a >= 0) ++o[a];
    return o;
  };
  auto Do = [&](std::array<int, 3> o) { return D(o[0], o[1], o[2]); };
  s.psi = D(0, 0, 0);
  Mat3 hess{};
  Vec3 grad_lap{};
  for (int i = 0; i < 3; ++i) {
    s.grad_psi[i] = Do(unit(i));
    for (int j = 0; j < 3; ++j) hess[i][j] = Do(unit(i, j));
    for (int m = 0; m < 3; ++m) grad_lap[i] += Do(unit(i, m, m));
  }
  const Vec3& e = direction;
  // phi_j = eps_jkl d_k psi e_l
  auto cross_grad = [&](const Vec3& g) {
    return Vec3{g[1] * e[2] - g[2] * e[1], g[2] * e[0] - g[0] * e[2], g[0] * e[1] - g[1] * e[0]};
  };
  s.phi = cross_grad(s.grad_psi);
  for (int i = 0; i < 3; ++i) s.grad_phi[i] = cross_grad(hess[i]);
  s.lap_phi = cross_grad(grad_lap);
  return s;
}

std::vector<TestFunction> default_test_family(double window_radius, std::uint64_t seed) {
  if (!(window_radius > 0.0)) throw DomainError("test family: window radius must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<TestFunction> out;
  for (double frac : {0.5, 0.4, 0.3}) {
    const double rho = frac * window_radius;
    const double d = 0.5 * (window_radius - rho);  // support stays within 0.5 (R + rho) < R
    for (int corner = 0; corner < 8; ++corner) {
      TestFunction f;
      f.radius = rho;
      for (int a = 0; a < 3; ++a) f.centre[a] = ((corner >> a) & 1) ? d : -d;
      Vec3 e{g(rng), g(rng), g(rng)};
      const double len = std::sqrt(e[0] * e[0] + e[1] * e[1] + e[2] * e[2]);
      for (double& x : e) x /= len;
      f.direction = e;
      out.push_back(f);
    }
  }
  return out;
}

std::string to_string(StationarySystem s) {
  switch (s) {
    case StationarySystem::self_similar_euler: return "self-similar-euler";
    case StationarySystem::renormalized_gradient: return "renormalized-gradient";
    case StationarySystem::stationary_navier_stokes: return "stationary-navier-stokes";
    case StationarySystem::weak_euler_limit: return "weak-euler-limit";
  }
  return "weak-euler-limit";
}

StationarySystem parse_stationary_system(const std::string& s) {
  for (auto v : {StationarySystem::self_similar_euler, StationarySystem::renormalized_gradient,
                 StationarySystem::stationary_navier_stokes, StationarySystem::weak_euler_limit}) {
    if (to_string(v) == s) return v;
  }
  throw DomainError("unknown stationary system '" + s + "'");
}

ResidualReport stationary_residual(const ProfileCandidate& candidate, StationarySystem system,
                                   const std::vector<TestFunction>& family, GradNorm convention) {
  if (family.size() < 8) throw DomainError("residual: need at least 8 test functions");
  const double R = candidate.window.radius;
  for (const TestFunction& f : family) {
    for (int d = 0; d < 3; ++d)
      if (std::abs(f.centre[d]) + f.radius > R * (1.0 + 1e-12))
        throw DomainError("residual: test function support exceeds the window");
  }
  const SpectralField& v = candidate.window.field;
  const GridSpec& g = v.grid;
  const PhysicalField vp = to_physical(v);
  const double alpha = candidate.alpha;
  const double h3 = g.cell_volume();

  ResidualReport r;
  r.system = system;
  r.family_size = int(family.size());
  if (system == StationarySystem::renormalized_gradient) r.grad_sup = grad_sup(v, convention).value;

  const int n = g.n;
  for (const TestFunction& f : family) {
    double nl = 0.0, lin = 0.0, nl_scale = 0.0, lin_scale = 0.0, div = 0.0;
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const Vec3 y{g.coordinate(i), g.coordinate(j), g.coordinate(k)};
          if (!f.inside(y)) continue;
          const TestFunction::Sample t = f.sample(y);
          const std::size_t idx = g.physical_index(i, j, k);
          const Vec3 V{vp.comp[0][idx], vp.comp[1][idx], vp.comp[2][idx]};
          // int (V.grad)V . phi = -int V_i V_j d_i phi_j
          double q = 0.0, gabs = 0.0;
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
              q += V[a] * V[b] * t.grad_phi[a][b];
              gabs += t.grad_phi[a][b] * t.grad_phi[a][b];
            }
          const double v2 = V[0] * V[0] + V[1] * V[1] + V[2] * V[2];
          nl -= q;
          nl_scale += v2 * std::sqrt(gabs);
          // int (y.grad)V . phi = -int V . (3 phi + (y.grad) phi)
          Vec3 ygrad{};
          for (int b = 0; b < 3; ++b)
            for (int a = 0; a < 3; ++a) ygrad[b] += y[a] * t.grad_phi[a][b];
          Vec3 op{};  // linear operator applied to phi, paired with V
          switch (system) {
            case StationarySystem::self_similar_euler:
              for (int b = 0; b < 3; ++b) op[b] = alpha * t.phi[b] - 3.0 * t.phi[b] - ygrad[b];
              break;
            case StationarySystem::renormalized_gradient:
              for (int b = 0; b < 3; ++b)
                op[b] = r.grad_sup / (alpha + 1.0) * (alpha * t.phi[b] - 3.0 * t.phi[b] - ygrad[b]);
              break;
            case StationarySystem::stationary_navier_stokes:
              for (int b = 0; b < 3; ++b) op[b] = -t.lap_phi[b];
              break;
            case StationarySystem::weak_euler_limit: break;
          }
          const double l = V[0] * op[0] + V[1] * op[1] + V[2] * op[2];
          lin += l;
          lin_scale += std::sqrt(v2) * std::sqrt(op[0] * op[0] + op[1] * op[1] + op[2] * op[2]);
          div += V[0] * t.grad_psi[0] + V[1] * t.grad_psi[1] + V[2] * t.grad_psi[2];
        }
    const double nl_coef = system == StationarySystem::self_similar_euler ? alpha + 1.0 : 1.0;
    nl *= nl_coef * h3;
    nl_scale *= std::abs(nl_coef) * h3;
    lin *= h3;
    lin_scale *= h3;
    r.nonlinear.push_back(nl);
    r.linear.push_back(lin);
    r.total.push_back(nl + lin);
    r.max_residual = std::max(r.max_residual, std::abs(nl + lin));
    const double sc = nl_scale + lin_scale;
    if (sc > 0.0) r.max_normalized = std::max(r.max_normalized, std::abs(nl + lin) / sc);
    r.max_divergence_pairing = std::max(r.max_divergence_pairing, std::abs(div * h3));
  }

  if (system == StationarySystem::stationary_navier_stokes) {
    // Pairing with phi = V: int (V.grad)V . V - int V . lap V.
    const PhysicalTensor grad = to_physical(gradient(v));
    const PhysicalField lap = to_physical(laplacian(v));
    double pair = 0.0, dir = 0.0;
    for (std::size_t idx = 0; idx < g.points(); ++idx) {
      for (int b = 0; b < 3; ++b) {
        double adv = 0.0;
        for (int a = 0; a < 3; ++a) {
          adv += vp.comp[a][idx] * grad.comp[a][b][idx];
          dir += grad.comp[a][b][idx] * grad.comp[a][b][idx];
        }
        pair += (adv - lap.comp[b][idx]) * vp.comp[b][idx];
      }
    }
    r.self_pairing = pair * h3;
    r.dirichlet = dir * h3;
  }
  return r;
}

ResidualReport stationary_residual(const ProfileCandidate& candidate, StationarySystem system) {
  return stationary_residual(candidate, system, default_test_family(candidate.window.radius));
}

EnergyIdentity profile_energy_identity(const ProfileCandidate& candidate, double alpha) {
  if (!(alpha > -1.0)) throw DomainError("energy identity: alpha must exceed -1");
  const SpectralField& v = candidate.window.field;
  const GridSpec& g = v.grid;
  const PhysicalField vp = to_physical(v);
  const int n = g.n;
  // Boundary layer: the outer tenth of the window on each side.
  const double layer = 0.9 * candidate.window.radius;
  double peak = 0.0, edge = 0.0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const std::size_t idx = g.physical_index(i, j, k);
        const double m = std::max({std::abs(vp.comp[0][idx]), std::abs(vp.comp[1][idx]), std::abs(vp.comp[2][idx])});
        peak = std::max(peak, m);
        if (std::abs(g.coordinate(i)) >= layer || std::abs(g.coordinate(j)) >= layer || std::abs(g.coordinate(k)) >= layer)
          edge = std::max(edge, m);
      }
  if (edge > 1e-10 * peak) throw DomainError("energy identity: candidate touches the window boundary");

  const PhysicalTensor grad = to_physical(gradient(v));
  double vv = 0.0, vyv = 0.0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Vec3 y{g.coordinate(i), g.coordinate(j), g.coordinate(k)};
        const std::size_t idx = g.physical_index(i, j, k);
        for (int b = 0; b < 3; ++b) {
          double yg = 0.0;
          for (int a = 0; a < 3; ++a) yg += y[a] * grad.comp[a][b][idx];
          vv += vp.comp[b][idx] * vp.comp[b][idx];
          vyv += vp.comp[b][idx] * yg;
        }
      }
  const double h3 = g.cell_volume();
  vv *= h3;
  vyv *= h3;
  EnergyIdentity e;
  e.integral = alpha / (alpha + 1.0) * vv + vyv / (alpha + 1.0);
  e.closed_form = (alpha - 1.5) / (alpha + 1.0) * vv;
  const double scale = std::max(std::abs(e.integral), std::abs(e.closed_form));
  e.relative_difference = scale == 0.0 ? 0.0 : std::abs(e.integral - e.closed_form) / std::max(scale, vv / (alpha + 1.0));
  return e;
}

}  // namespace bulb
