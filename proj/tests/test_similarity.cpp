#include <cmath>

#include "bulb/diagnostics.hpp"
#include "bulb/initial.hpp"
#include "bulb/point_eval.hpp"
#include "bulb/similarity.hpp"
#include "bulb/solver.hpp"
#include "bulb/spectral.hpp"
#include "doctest.h"

using namespace bulb;

namespace {

TrajectoryLog synthetic_log(double t_end, int rows, double grad, double omega) {
  TrajectoryLog log({2.0, kInfinity});
  for (int i = 0; i < rows; ++i) {
    LogRow r;
    r.t = t_end * i / (rows - 1);
    r.grad_sup = grad;
    r.omega_sup = omega;
    r.enstrophy = 1.0;
    r.energy = 1.0;
    r.omega_lp = {1.0, omega};
    log.append(r);
  }
  return log;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double box_lp(const PhysicalField& f, double p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < f.comp[0].size(); ++i) {
    const double m = std::sqrt(f.comp[0][i] * f.comp[0][i] + f.comp[1][i] * f.comp[1][i] + f.comp[2][i] * f.comp[2][i]);
    acc = std::isinf(p) ? std::max(acc, m) : acc + std::pow(m, p);
  }
  return std::isinf(p) ? acc : std::pow(acc * f.grid.cell_volume(), 1.0 / p);
}

}  // namespace

TEST_CASE("constant schedule is the identity transform") {
  const SimilarityMap m = SimilarityMap::constant(1.0);
  for (double t : {0.0, 0.3, 7.0}) {
    CHECK(m.s_of_t(t) == t);
    CHECK(m.mu(t) == 1.0);
    CHECK(m.drift_coefficient(t) == 0.0);
    CHECK(m.space_factor(t) == 1.0);
    CHECK(m.t_of_s(t) == t);
  }
}

TEST_CASE("power law hand values") {
  const SimilarityMap m = SimilarityMap::power_law(1.0, 1.0, 2.0);
  CHECK(m.mu(0.5) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(m.s_of_t(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.g_of_s(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.drift_coefficient(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(m.s_of_t(1.0), DomainError);
  CHECK_THROWS_AS(SimilarityMap::power_law(1.0, 1.0, 0.5), DomainError);
}

TEST_CASE("power law closed forms across a t grid") {
  for (double gamma : {1.0, 1.5, 2.0, 3.0}) {
    const double T = 1.3;
    const SimilarityMap m = SimilarityMap::power_law(0.5, T, gamma);
    for (int i = 0; i < 100; ++i) {
      const double t = T * 0.99 * i / 99.0;
      double s_closed;
      if (gamma == 1.0) {
        s_closed = std::log(T / (T - t));
      } else {
        s_closed = 1.0 / ((gamma - 1.0) * std::pow(T, gamma - 1.0)) *
                   (std::pow(T, gamma - 1.0) / std::pow(T - t, gamma - 1.0) - 1.0);
      }
      const double s = m.s_of_t(t);
      CHECK(std::abs(s - s_closed) <= 1e-12 * std::max(1e-3, s_closed));
      // mu'/mu^2 from the definition mu = (T - t)^-gamma
      const double b_def = gamma * std::pow(T - t, -gamma - 1.0) / std::pow(T - t, -2.0 * gamma);
      CHECK(rel(m.drift_coefficient(t), b_def) < 1e-12);
      CHECK(rel(m.g_of_s(s), b_def) < 1e-10);
      CHECK(std::abs(m.t_of_s(s) - t) < 1e-12);
    }
  }
}

TEST_CASE("gamma to one limit and first-system time") {
  const double T = 1.0;
  const SimilarityMap near = SimilarityMap::power_law(1.0, T, 1.0 + 1e-6);
  const SimilarityMap one = SimilarityMap::power_law(1.0, T, 1.0);
  for (double t : {0.1, 0.5, 0.9}) {
    CHECK(std::abs(near.s_of_t(t) - std::log(T / (T - t))) < 1e-4);
    for (double alpha : {0.0, 1.0, 1.5}) {
      CHECK(rel(e1_time(one.s_of_t(t), alpha), std::log(T / (T - t)) / (alpha + 1.0)) < 1e-14);
    }
  }
}

TEST_CASE("exponential families from logs") {
  const TrajectoryLog unit = synthetic_log(1.0, 2001, 1.0, 1.0);
  const SimilarityMap plus = SimilarityMap::exp_gradient(1.0, 1.0, 1, unit);
  const SimilarityMap minus = SimilarityMap::exp_gradient(1.0, 1.0, -1, unit);
  CHECK(std::abs(maximal_s(plus, unit).value - (std::exp(1.0) - 1.0)) < 1e-6);
  CHECK(std::abs(maximal_s(minus, unit).value - (1.0 - std::exp(-1.0))) < 1e-6);
  CHECK(maximal_s(plus, unit).lower_bound);
  CHECK(rel(plus.drift_coefficient(0.4), std::exp(-0.4)) < 1e-12);
  CHECK(std::abs(plus.t_of_s(plus.s_of_t(0.37)) - 0.37) < 1e-12);
  CHECK_THROWS_AS(plus.s_of_t(1.5), DomainError);
  CHECK_THROWS_AS(plus.t_of_s(10.0), DomainError);

  const TrajectoryLog still = synthetic_log(0.8, 11, 0.0, 0.0);
  CHECK(maximal_s(SimilarityMap::exp_gradient(1.0, 2.0, 1, still), still).value == doctest::Approx(0.8));
}

TEST_CASE("push and pull") {
  const GridSpec g{16};
  const SpectralField v = random_solenoidal(g, {21, 1, 4, 1.0});

  SUBCASE("identity transform reproduces the field on the window") {
    const SimilarityMap id = SimilarityMap::constant(1.0);
    const WindowField w = push_snapshot(v, 0.0, id, 0.0);
    CHECK(w.radius == doctest::Approx(kPi));
    const PhysicalField a = to_physical(w.field), b = to_physical(v);
    double err = 0.0;
    for (int d = 0; d < 3; ++d)
      for (std::size_t i = 0; i < a.comp[d].size(); ++i) err = std::max(err, std::abs(a.comp[d][i] - b.comp[d][i]));
    CHECK(err < 1e-12);
  }
  SUBCASE("round trip with mu = 2") {
    const SimilarityMap m = SimilarityMap::power_law(1.0, 1.0, 1.0);
    const double t = 0.5;  // mu = 2
    CHECK(m.mu(t) == doctest::Approx(2.0));
    const WindowField w = push_snapshot(v, t, m, 0.0);
    const SpectralField back = pull_snapshot(w, m, g);
    SpectralField d = back;
    d.add_scaled(v, -1.0);
    CHECK(to_physical(d).max_abs() < 1e-8);
    const std::vector<Vec3> pts{{0.1, -0.5, 1.0}, {2.0, 0.3, -3.0}};
    const auto pulled = pull_points(w, m, pts);
    const PointEvaluator ev(v);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Vec3 ref = ev.value(pts[i]);
      for (int c = 0; c < 3; ++c) CHECK(std::abs(pulled[i][c] - ref[c]) < 1e-8);
    }
  }
  SUBCASE("norm bookkeeping on pushed snapshots") {
    const SimilarityMap m = SimilarityMap::power_law(0.5, 1.0, 2.0);
    const double t = 0.3;
    const double mu = m.mu(t), a = m.alpha();
    const WindowField w = push_snapshot(v, t, m, 0.0);
    const PhysicalField om = to_physical(curl(v)), Om = to_physical(curl(w.field));
    for (double p : {1.0, 2.0, kInfinity}) {
      const double expo = std::isinf(p) ? 1.0 : 1.0 - 3.0 / ((a + 1.0) * p);
      CHECK(rel(box_lp(om, p), std::pow(mu, expo) * box_lp(Om, p)) < 1e-8);
    }
    const PhysicalField vv = to_physical(v), VV = to_physical(w.field);
    CHECK(rel(box_lp(vv, kInfinity), std::pow(mu, a / (a + 1.0)) * box_lp(VV, kInfinity)) < 1e-8);
  }
  SUBCASE("window violations report the admissible radius") {
    const SimilarityMap m = SimilarityMap::power_law(1.0, 1.0, 1.0);
    const double r_max = max_window_radius(g, m, 0.5);
    CHECK(r_max == doctest::Approx(kPi * std::sqrt(2.0)));
    try {
      push_snapshot(v, 0.5, m, 2.0 * r_max);
      FAIL("expected WindowError");
    } catch (const WindowError& e) {
      CHECK(e.max_radius() == doctest::Approx(r_max));
    }
  }
}

TEST_CASE("BKM invariant") {
  SUBCASE("zero flow") {
    const TrajectoryLog z = synthetic_log(1.0, 11, 0.0, 0.0);
    TrajectoryLog zr = z;
    zr.meta = {{"renorm_mode", "self_consistent_gradient"}, {"gamma", "1"}, {"sign", "1"}, {"grad_norm", "frobenius"}};
    const BkmInvariantReport r = bkm_invariant_check(z, zr);
    CHECK(r.physical_integral == 0.0);
    CHECK(r.renormalized_integral == 0.0);
    CHECK(r.relative_difference == 0.0);
  }
  SUBCASE("steady shear paired runs") {
    const GridSpec g{16};
    const SpectralField v0 = shear_flow(g);
    SolverConfig phys;
    phys.dt = 1e-2;
    phys.t_end = 1.0;
    TrajectoryLog plog;
    run(v0, phys, &plog);
    CHECK(plog.back().gradint == doctest::Approx(1.0).epsilon(1e-12));

    SolverConfig ren = phys;
    ren.dt = 1e-3;
    ren.t_end = std::exp(1.0) - 1.0;
    RenormSpec rs;
    rs.alpha = 1.0;
    rs.mode = RenormMode::self_consistent_gradient;
    rs.gamma = 1.0;
    rs.sign = 1;
    ren.renorm = rs;
    TrajectoryLog rlog;
    const RunResult rr = run(v0, ren, &rlog);
    CHECK(rr.state.log_mu == doctest::Approx(1.0).epsilon(1e-6));
    const BkmInvariantReport r = bkm_invariant_check(plog, rlog);
    CHECK(r.relative_difference < 1e-3);
    CHECK(r.physical_integral == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("renormalized run matches the transformed physical run") {
  const GridSpec g{16};
  const SpectralField v0 = taylor_green(g);
  SolverConfig phys;
  phys.dt = 1e-3;
  phys.t_end = 0.3;
  phys.diagnostics.convention = GradNorm::entry_sum;
  TrajectoryLog plog;
  run(v0, phys, &plog);
  const SimilarityMap m = SimilarityMap::exp_gradient(1.0, 2.0, 1, plog);

  const double s1 = 0.2;
  const double t1 = m.t_of_s(s1);
  REQUIRE(t1 < 0.3);
  SolverConfig to_t1 = phys;
  to_t1.t_end = t1;
  const SpectralField v1 = run(v0, to_t1).state.velocity;

  SolverConfig ren = phys;
  ren.t_end = s1;
  RenormSpec rs;
  rs.alpha = 1.0;
  rs.mode = RenormMode::self_consistent_gradient;
  rs.gamma = 2.0;
  rs.convention = GradNorm::entry_sum;
  ren.renorm = rs;
  TrajectoryLog rlog;
  const RunResult rr = run(v0, ren, &rlog);
  CHECK(std::abs(rr.state.log_mu - m.log_mu(t1)) < 1e-5);

  const WindowField w = push_snapshot(v1, t1, m, 0.0);
  CHECK(rel(w.field.grid.domain_length, rr.state.velocity.grid.domain_length) < 1e-5);
  SpectralField d = rr.state.velocity;
  d.grid = w.field.grid;
  d.add_scaled(w.field, -1.0);
  CHECK(spectral_l2_norm(d) < 1e-4 * spectral_l2_norm(w.field));

  // Norms implied by the physical log agree with the direct renormalized log.
  const TrajectoryLog implied = renormalize_log(plog, m);
  const double s_direct = rlog.back().t;
  const double grad_implied = interpolate(implied.times(), implied.column("grad_sup"), s_direct);
  CHECK(rel(grad_implied, rlog.back().grad_sup) < 1e-3);
}
