#include "bulb/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "bulb/diagnostics.hpp"
#include "bulb/point_eval.hpp"
#include "bulb/spectral.hpp"

namespace bulb {

std::string to_string(Frame f) { return f == Frame::physical ? "physical" : "renormalized"; }

ParticleSet ParticleSet::seeded(std::vector<Vec3> labels, Frame frame, double alpha) {
  ParticleSet p;
  p.positions = labels;
  p.labels = std::move(labels);
  p.omega_mag.assign(p.labels.size(), 0.0);
  p.stretch_integral.assign(p.labels.size(), 0.0);
  p.frame = frame;
  p.alpha = alpha;
  p.validate();
  return p;
}

void ParticleSet::validate() const {
  const std::size_t n = labels.size();
  if (positions.size() != n || omega_mag.size() != n || stretch_integral.size() != n) {
    throw DomainError("particles: inconsistent array sizes");
  }
  if (frame == Frame::renormalized && !(alpha > -1.0)) throw DomainError("particles: alpha must exceed -1");
  for (std::size_t i = 0; i < n; ++i) {
    for (double c : positions[i])
      if (!std::isfinite(c)) throw DomainError("particles: non-finite position");
    if (!(omega_mag[i] >= 0.0)) throw DomainError("particles: |omega| must be non-negative");
  }
}

std::vector<Vec3> default_seeds(const SpectralField& v) {
  const GridSpec& g = v.grid;
  const double L = g.domain_length;
  std::vector<Vec3> seeds;
  for (int k = 0; k < 5; ++k)
    for (int j = 0; j < 5; ++j)
      for (int i = 0; i < 5; ++i) {
        seeds.push_back({-0.5 * L + (i + 0.5) * L / 5, -0.5 * L + (j + 0.5) * L / 5, -0.5 * L + (k + 0.5) * L / 5});
      }
  const PhysicalField w = to_physical(curl(v));
  double best = -1.0;
  std::size_t arg = 0;
  for (std::size_t p = 0; p < g.points(); ++p) {
    const double m = w.comp[0][p] * w.comp[0][p] + w.comp[1][p] * w.comp[1][p] + w.comp[2][p] * w.comp[2][p];
    if (m > best) {
      best = m;
      arg = p;
    }
  }
  const int n = g.n;
  const int i = static_cast<int>(arg % n), j = static_cast<int>((arg / n) % n), k = static_cast<int>(arg / (std::size_t(n) * n));
  seeds.push_back({g.coordinate(i), g.coordinate(j), g.coordinate(k)});
  return seeds;
}

std::vector<Vec3> tetrahedron(const Vec3& c, double edge) {
  // Alternate cube corners form a regular tetrahedron with edge sqrt(2) * side.
  const double h = 0.5 * edge / std::sqrt(2.0);
  const double corners[4][3] = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  std::vector<Vec3> out;
  for (const auto& q : corners) out.push_back({c[0] + h * q[0], c[1] + h * q[1], c[2] + h * q[2]});
  return out;
}

double tetrahedron_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const Vec3 u{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
  const Vec3 v{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
  const Vec3 w{d[0] - a[0], d[1] - a[1], d[2] - a[2]};
  return (u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0]) +
          u[2] * (v[0] * w[1] - v[1] * w[0])) /
         6.0;
}

Vec3 vorticity_from_gradient(const Mat3& m) {
  return {m[1][2] - m[2][1], m[2][0] - m[0][2], m[0][1] - m[1][0]};
}

double stretching_rate(const Mat3& m) {
  const Vec3 w = vorticity_from_gradient(m);
  const double n2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
  if (n2 == 0.0) return 0.0;
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += w[i] * m[i][j] * w[j];
  return s / n2;
}

namespace {

constexpr double kStageFraction[4] = {0.0, 0.5, 0.5, 1.0};

double magnitude(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

}  // namespace

void ParticleIntegrator::stage(int index, double time, const SpectralField& velocity, double drift) {
  if (index < 0 || index > 3) throw DomainError("particles: stage index out of range");
  const std::size_t n = p_.size();
  if (index == 0) {
    t0_ = time;
    x0_ = p_.positions;
  } else {
    dt_ = (time - t0_) / kStageFraction[index];
  }
  const double lin = p_.frame == Frame::renormalized ? drift / (p_.alpha + 1.0) : 0.0;
  const PointEvaluator eval(velocity);
  kx_[index].resize(n);
  kq_[index].resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    Vec3 x = x0_[a];
    if (index > 0) {
      const double c = kStageFraction[index] * dt_;
      for (int d = 0; d < 3; ++d) x[d] += c * kx_[index - 1][a][d];
    }
    const PointSample s = eval.sample(x);
    for (int d = 0; d < 3; ++d) kx_[index][a][d] = s.value[d] + lin * x[d];
    kq_[index][a] = stretching_rate(s.gradient);
    if (index == 0) p_.omega_mag[a] = magnitude(vorticity_from_gradient(s.gradient));
  }
  if (index == 3) {
    for (std::size_t a = 0; a < n; ++a) {
      for (int d = 0; d < 3; ++d) {
        p_.positions[a][d] =
            x0_[a][d] + dt_ / 6.0 * (kx_[0][a][d] + 2.0 * kx_[1][a][d] + 2.0 * kx_[2][a][d] + kx_[3][a][d]);
      }
      p_.stretch_integral[a] += dt_ / 6.0 * (kq_[0][a] + 2.0 * kq_[1][a] + 2.0 * kq_[2][a] + kq_[3][a]);
    }
  }
}

ParticleSet advect(ParticleSet particles, const VelocityProvider& provider, double t, double dt) {
  if (!(dt > 0.0)) throw DomainError("advect: dt must be positive");
  ParticleIntegrator integ(particles);
  for (int i = 0; i < 4; ++i) {
    const double ti = t + kStageFraction[i] * dt;
    const FrameVelocity fv = provider(ti);
    integ.stage(i, ti, fv.velocity, fv.drift);
  }
  return particles;
}

void refresh_vorticity(ParticleSet& particles, const SpectralField& velocity) {
  const PointEvaluator eval(velocity);
  for (std::size_t a = 0; a < particles.size(); ++a) {
    particles.omega_mag[a] = magnitude(vorticity_from_gradient(eval.sample(particles.positions[a]).gradient));
  }
}

void ParticleHistory::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << "# frame=" << to_string(frame) << "\n";
  out << "label," << (frame == Frame::physical ? "t" : "s") << ",x,y,z,omega_mag,stretch_integral\n";
  for (const ParticleFrame& f : frames) {
    for (std::size_t a = 0; a < labels.size(); ++a) {
      out << a << ',' << format_double(f.time) << ',' << format_double(f.positions[a][0]) << ','
          << format_double(f.positions[a][1]) << ',' << format_double(f.positions[a][2]) << ','
          << format_double(f.omega_mag[a]) << ',' << format_double(f.stretch_integral[a]) << '\n';
    }
  }
  if (!out) throw Error("write failed: " + path);
}

TracerRun run_with_particles(const SpectralField& v0, const SolverConfig& cfg, ParticleSet particles,
                             TrajectoryLog* log, int record_stride) {
  if (record_stride < 1) throw DomainError("particles: record stride must be positive");
  const Frame want = cfg.renorm ? Frame::renormalized : Frame::physical;
  if (particles.frame != want) throw DomainError("particles: frame does not match the solver configuration");
  if (cfg.renorm) particles.alpha = cfg.renorm->alpha;
  particles.validate();

  TracerRun out;
  ParticleHistory& h = out.history;
  h.frame = particles.frame;
  h.labels = particles.labels;
  h.convention = cfg.diagnostics.convention;
  if (cfg.renorm) {
    h.alpha = cfg.renorm->alpha;
    h.mode = cfg.renorm->mode;
    h.gamma = cfg.renorm->gamma;
    h.sign = cfg.renorm->sign;
    h.convention = cfg.renorm->convention;
  }
  auto record = [&](double time, double log_mu, const SpectralField& v) {
    ParticleFrame f;
    f.time = time;
    f.log_mu = log_mu;
    f.grad_sup = grad_sup(v, h.convention).value;
    f.omega_sup = lp_norm(to_physical(curl(v)), kInfinity);
    f.positions = particles.positions;
    f.omega_mag = particles.omega_mag;
    f.stretch_integral = particles.stretch_integral;
    h.frames.push_back(std::move(f));
  };

  ParticleIntegrator integ(particles);
  long steps = 0;
  const StageObserver observer = [&](const StageView& view) {
    integ.stage(view.stage, view.time, view.velocity, view.drift);
    if (view.stage == 0) {
      if (steps % record_stride == 0) record(view.time, view.log_mu, view.velocity);
      ++steps;
    }
  };
  out.run = run(v0, cfg, log, observer);
  const SimState& st = out.run.state;
  refresh_vorticity(particles, st.velocity);
  if (h.frames.empty() || h.frames.back().time < st.time) record(st.time, st.log_mu, st.velocity);
  out.particles = std::move(particles);
  return out;
}

TransportReport verify_transport_identity(const ParticleHistory& history, double floor) {
  TransportReport rep;
  if (history.frames.empty()) throw DomainError("transport: empty particle history");
  const ParticleFrame& f0 = history.frames.front();
  for (std::size_t a = 0; a < history.labels.size(); ++a) {
    bool excluded = false;
    for (const ParticleFrame& f : history.frames) {
      if (f.omega_mag[a] < floor * f.omega_sup || f.omega_sup == 0.0) excluded = true;
    }
    if (excluded) {
      ++rep.excluded;
      continue;
    }
    ++rep.checked;
    for (const ParticleFrame& f : history.frames) {
      const double drift = f.log_mu - f0.log_mu;
      const double predicted = f0.omega_mag[a] * std::exp(f.stretch_integral[a] - f0.stretch_integral[a] - drift);
      const double err = std::abs(f.omega_mag[a] - predicted) / predicted;
      if (err > rep.max_relative_error) {
        rep.max_relative_error = err;
        rep.worst_particle = a;
        rep.worst_time = f.time;
      }
    }
  }
  return rep;
}

DecayReport verify_renormalized_decay_along_particles(const ParticleHistory& history) {
  if (history.frame != Frame::renormalized || history.mode != RenormMode::self_consistent_gradient) {
    throw DomainError("decay check: needs a self-consistent gradient run in the renormalized frame");
  }
  if (history.frames.empty()) throw DomainError("decay check: empty particle history");
  DecayReport rep;
  const ParticleFrame& f0 = history.frames.front();
  double scale = 0.0;
  for (double w : f0.omega_mag) scale = std::max(scale, w);
  if (scale == 0.0) scale = 1.0;
  const double g1 = history.gamma - 1.0;
  bool first = true;
  for (const ParticleFrame& f : history.frames) {
    const double s = f.time - f0.time;
    for (std::size_t a = 0; a < history.labels.size(); ++a) {
      const double w0 = f0.omega_mag[a], w = f.omega_mag[a];
      if (w > f.grad_sup) rep.premise_holds = false;
      double margin;
      if (history.sign > 0) {
        margin = (w0 / (1.0 + g1 * s * w0) - w) / scale;
      } else {
        const double den = 1.0 - g1 * s * w0;
        if (den <= 0.0) {
          ++rep.suspended;
          continue;
        }
        margin = (w - w0 / den) / scale;
      }
      ++rep.comparisons;
      if (first || margin < rep.worst_margin) {
        rep.worst_margin = margin;
        rep.worst_particle = a;
        rep.worst_s = s;
        first = false;
      }
    }
  }
  return rep;
}

}  // namespace bulb
