#include <cmath>

#include "bulb/initial.hpp"
#include "bulb/profile.hpp"
#include "bulb/solver.hpp"
#include "bulb/spectral.hpp"
#include "doctest.h"

using namespace bulb;

namespace {

double max_coeff_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (int d = 0; d < 3; ++d)
    for (std::size_t i = 0; i < a.comp[d].size(); ++i) m = std::max(m, std::abs(a.comp[d][i] - b.comp[d][i]));
  return m;
}

WindowField scaled(const WindowField& w, double f) {
  WindowField out = w;
  out.field *= f;
  return out;
}

ProfileCandidate candidate_of(const WindowField& w, double alpha) {
  ProfileCandidate c;
  c.window = w;
  c.alpha = alpha;
  return c;
}

}  // namespace

TEST_CASE("synthesized self-similar fields") {
  SUBCASE("unit scale reproduces the template") {
    const WindowField tmpl = gaussian_vortex_template(32, kPi, 0.6, 3);
    const SpectralField v = synthesize_selfsimilar(tmpl, 1.0, 2.0, 1.0, GridSpec{32});
    CHECK(max_coeff_diff(v, tmpl.field) < 1e-12 * tmpl.field.max_abs());
  }
  const WindowField tmpl = gaussian_vortex_template(64, kPi, 0.5, 5);
  const double base = spectral_l2_norm(tmpl.field);
  SUBCASE("energy is constant at alpha = 3/2") {
    for (double t : {0.0, 0.2, 0.4}) {
      const SpectralField v = synthesize_selfsimilar(tmpl, 1.5, 1.0, t, GridSpec{64});
      CHECK(spectral_l2_norm(v) == doctest::Approx(base).epsilon(1e-6));
    }
  }
  SUBCASE("energy scaling exponent at alpha = 1") {
    const double t1 = 0.1, t2 = 0.45, T = 1.0;
    const double n1 = spectral_l2_norm(synthesize_selfsimilar(tmpl, 1.0, T, t1, GridSpec{64}));
    const double n2 = spectral_l2_norm(synthesize_selfsimilar(tmpl, 1.0, T, t2, GridSpec{64}));
    CHECK(n2 / n1 == doctest::Approx(std::pow((T - t1) / (T - t2), (1.0 - 1.5) / 2.0)).epsilon(1e-6));
  }
  SUBCASE("support escape") {
    CHECK_THROWS_AS(synthesize_selfsimilar(tmpl, 1.0, 5.0, 1.0, GridSpec{64}), DomainError);
    CHECK_THROWS_AS(synthesize_selfsimilar(tmpl, 1.0, 1.0, 1.0, GridSpec{64}), DomainError);
  }
}

TEST_CASE("profile convergence") {
  SUBCASE("exact self-similarity round trip") {
    const WindowField tmpl = gaussian_vortex_template(64, kPi, 0.5, 5);
    const double alpha = 1.5;
    const SimilarityMap map = SimilarityMap::power_law(alpha, 1.0, 1.0);
    std::vector<WindowField> snaps;
    for (double t : {0.0, 0.2, 0.4}) {
      snaps.push_back(push_snapshot(synthesize_selfsimilar(tmpl, alpha, 1.0, t, GridSpec{64}), t, map, kPi, 64));
    }
    const PhysicalField ref = to_physical(tmpl.field);
    const double scale = tmpl.field.max_abs();
    for (double p : {1.0, 2.0, kInfinity}) {
      ConvergenceOptions o;
      o.p = p;
      const ConvergenceReport r = profile_convergence_test(snaps, o);
      for (double d : r.differences) CHECK(d < 1e-8);
      CHECK(r.verdict == ProfileVerdict::converging);
      const PhysicalField last = to_physical(r.candidate.window.field);
      PhysicalField err = last;
      for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < err.comp[c].size(); ++i) err.comp[c][i] -= ref.comp[c][i];
      CHECK(window_lp_norm(err, p, kInfinity) < 1e-8);
      CHECK(r.candidate.provenance == Provenance::run_limit);
    }
    CHECK(scale > 0.0);
  }
  SUBCASE("geometric perturbation halves the differences") {
    const WindowField base = gaussian_vortex_template(32, kPi, 0.6, 1);
    const WindowField pert = gaussian_vortex_template(32, kPi, 0.6, 2);
    std::vector<WindowField> snaps;
    for (int n = 0; n < 6; ++n) {
      WindowField w = base;
      w.field.add_scaled(pert.field, std::pow(2.0, -n));
      w.s = n;
      snaps.push_back(w);
    }
    const ConvergenceReport r = profile_convergence_test(snaps, {});
    for (std::size_t i = 0; i + 1 < r.differences.size(); ++i)
      CHECK(r.differences[i + 1] / r.differences[i] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(r.rate == doctest::Approx(std::log(2.0)).epsilon(1e-10));
    CHECK(r.verdict == ProfileVerdict::converging);
    ConvergenceOptions o;
    o.radius = type2_window(1.0, 2.0, 1.0);
    o.vorticity = true;
    const ConvergenceReport rv = profile_convergence_test(snaps, o);
    CHECK(rv.radii.front() == doctest::Approx(1.0));
    CHECK(rv.verdict == ProfileVerdict::converging);
  }
  SUBCASE("steady shear collapses under the exponential transform") {
    const GridSpec g{16};
    SolverConfig c;
    c.dt = 0.1;
    c.t_end = 2.0;
    TrajectoryLog log;
    const SpectralField v0 = shear_flow(g);
    run(v0, c, &log);
    const SimilarityMap map = SimilarityMap::exp_gradient(1.0, 1.0, 1, log);
    std::vector<WindowField> snaps;
    for (double t : {0.0, 0.5, 1.0, 1.5, 2.0}) snaps.push_back(push_snapshot(v0, t, map, kPi, 16));
    const ConvergenceReport r = profile_convergence_test(snaps, {});
    CHECK(r.verdict == ProfileVerdict::vanishing);
    CHECK(to_string(r.verdict) == "diverging-to-zero");
    CHECK(r.norm_rate > 0.0);
  }
  SUBCASE("argument checks") {
    const WindowField a = gaussian_vortex_template(16, kPi, 0.8, 1);
    const WindowField b = gaussian_vortex_template(32, kPi, 0.8, 1);
    CHECK_THROWS_AS(profile_convergence_test({a, a, b}, {}), DomainError);
    CHECK_THROWS_AS(profile_convergence_test({a, a}, {}), DomainError);
  }
}

TEST_CASE("test function family") {
  const auto fam = default_test_family(kPi);
  CHECK(fam.size() == 24);
  const TestFunction& f = fam[5];
  const Vec3 y{f.centre[0] + 0.1 * f.radius, f.centre[1] - 0.3 * f.radius, f.centre[2] + 0.2 * f.radius};
  const auto s = f.sample(y);
  CHECK(std::abs(s.grad_phi[0][0] + s.grad_phi[1][1] + s.grad_phi[2][2]) < 1e-12);
  // Central differences of the analytic gradient give the Laplacian.
  const double h = 1e-4;
  for (int j = 0; j < 3; ++j) {
    double lap = 0.0;
    for (int i = 0; i < 3; ++i) {
      Vec3 yp = y, ym = y;
      yp[i] += h;
      ym[i] -= h;
      lap += (f.sample(yp).grad_phi[i][j] - f.sample(ym).grad_phi[i][j]) / (2.0 * h);
    }
    CHECK(lap == doctest::Approx(s.lap_phi[j]).epsilon(1e-6));
    double dpsi = 0.0;
    Vec3 yp = y, ym = y;
    yp[j] += h;
    ym[j] -= h;
    dpsi = (f.sample(yp).psi - f.sample(ym).psi) / (2.0 * h);
    CHECK(dpsi == doctest::Approx(s.grad_psi[j]).epsilon(1e-6));
  }
  CHECK(f.sample({f.centre[0] + f.radius, f.centre[1], f.centre[2]}).psi == 0.0);
}

TEST_CASE("stationary residuals") {
  SUBCASE("zero candidate") {
    const ProfileCandidate c = candidate_of({SpectralField::zeros(GridSpec{16, kTwoPi}), kPi}, 1.0);
    for (auto sys : {StationarySystem::self_similar_euler, StationarySystem::renormalized_gradient,
                     StationarySystem::stationary_navier_stokes, StationarySystem::weak_euler_limit}) {
      const ResidualReport r = stationary_residual(c, sys);
      CHECK(r.max_residual == 0.0);
      CHECK(r.max_normalized == 0.0);
      CHECK(r.family_size == 24);
    }
  }
  SUBCASE("shear is a stationary Euler flow") {
    WindowField w;
    w.field = shear_flow(GridSpec{64, kTwoPi});
    w.radius = kPi;
    const ResidualReport r = stationary_residual(candidate_of(w, 1.0), StationarySystem::weak_euler_limit);
    CHECK(r.max_residual < 1e-8);
    CHECK(r.max_divergence_pairing < 1e-8);
  }
  const WindowField tmpl = gaussian_vortex_template(64, kPi, 0.5, 9);
  SUBCASE("weak form agrees with the strong form") {
    const double alpha = 1.0;
    const ProfileCandidate c = candidate_of(tmpl, alpha);
    const auto fam = default_test_family(kPi);
    const ResidualReport r = stationary_residual(c, StationarySystem::self_similar_euler, fam);
    const GridSpec& g = tmpl.field.grid;
    const PhysicalField v = to_physical(tmpl.field);
    const PhysicalTensor dv = to_physical(gradient(tmpl.field));
    double scale = 0.0;
    for (std::size_t k = 0; k < fam.size(); ++k) {
      double strong = 0.0;
      for (int kk = 0; kk < g.n; ++kk)
        for (int j = 0; j < g.n; ++j)
          for (int i = 0; i < g.n; ++i) {
            const Vec3 y{g.coordinate(i), g.coordinate(j), g.coordinate(kk)};
            if (!fam[k].inside(y)) continue;
            const auto t = fam[k].sample(y);
            const std::size_t idx = g.physical_index(i, j, kk);
            for (int b = 0; b < 3; ++b) {
              double ygrad = 0.0, adv = 0.0;
              for (int a = 0; a < 3; ++a) {
                ygrad += y[a] * dv.comp[a][b][idx];
                adv += v.comp[a][idx] * dv.comp[a][b][idx];
              }
              strong += (alpha * v.comp[b][idx] + ygrad + (alpha + 1.0) * adv) * t.phi[b];
            }
          }
      strong *= g.cell_volume();
      scale = std::max(scale, std::abs(r.nonlinear[k]) + std::abs(r.linear[k]));
      CHECK(r.total[k] == doctest::Approx(strong).epsilon(1e-6).scale(1.0));
    }
    CHECK(scale > 1e-3);
  }
  SUBCASE("pairings scale bilinearly") {
    const auto fam = default_test_family(kPi);
    const ResidualReport r1 = stationary_residual(candidate_of(tmpl, 1.0), StationarySystem::self_similar_euler, fam);
    const ResidualReport r2 =
        stationary_residual(candidate_of(scaled(tmpl, 2.0), 1.0), StationarySystem::self_similar_euler, fam);
    for (std::size_t k = 0; k < fam.size(); ++k) {
      CHECK(std::abs(r2.nonlinear[k] - 4.0 * r1.nonlinear[k]) <= 1e-10 * std::abs(r2.nonlinear[k]) + 1e-300);
      CHECK(std::abs(r2.linear[k] - 2.0 * r1.linear[k]) <= 1e-10 * std::abs(r2.linear[k]) + 1e-300);
    }
  }
  SUBCASE("Navier-Stokes pairing with the candidate gives the Dirichlet energy") {
    const ResidualReport r = stationary_residual(candidate_of(tmpl, 1.0), StationarySystem::stationary_navier_stokes);
    CHECK(r.dirichlet > 0.0);
    CHECK(r.self_pairing == doctest::Approx(r.dirichlet).epsilon(1e-6));
  }
  SUBCASE("renormalized gradient system uses the gradient sup") {
    const ResidualReport r = stationary_residual(candidate_of(tmpl, 1.0), StationarySystem::renormalized_gradient);
    CHECK(r.grad_sup > 0.0);
    CHECK(std::isfinite(r.max_normalized));
  }
  SUBCASE("support checks") {
    std::vector<TestFunction> fam = default_test_family(kPi);
    fam[0].centre = {3.0, 0.0, 0.0};
    CHECK_THROWS_AS(stationary_residual(candidate_of(tmpl, 1.0), StationarySystem::weak_euler_limit, fam), DomainError);
    fam.resize(4);
    CHECK_THROWS_AS(stationary_residual(candidate_of(tmpl, 1.0), StationarySystem::weak_euler_limit, fam), DomainError);
  }
  CHECK(parse_stationary_system("weak-euler-limit") == StationarySystem::weak_euler_limit);
  CHECK_THROWS_AS(parse_stationary_system("nope"), DomainError);
}

TEST_CASE("profile energy identity") {
  const WindowField tmpl = gaussian_vortex_template(64, kPi, 0.4, 4);
  const ProfileCandidate c = candidate_of(tmpl, 1.0);
  const double norm2 = std::pow(spectral_l2_norm(tmpl.field), 2);
  const EnergyIdentity e32 = profile_energy_identity(c, 1.5);
  CHECK(std::abs(e32.integral) < 1e-10 * norm2);
  const EnergyIdentity e1 = profile_energy_identity(c, 1.0);
  CHECK(e1.closed_form == doctest::Approx(-0.25 * norm2).epsilon(1e-12));
  CHECK(e1.integral == doctest::Approx(e1.closed_form).epsilon(1e-6));
  for (double a : {0.0, 0.5, 2.0, 3.0}) {
    const EnergyIdentity e = profile_energy_identity(c, a);
    CHECK((e.integral > 0.0) == (a > 1.5));
    CHECK(e.relative_difference < 1e-6);
  }
  const EnergyIdentity z = profile_energy_identity(candidate_of({SpectralField::zeros(GridSpec{16, kTwoPi}), kPi}, 1.0), 1.0);
  CHECK(z.integral == 0.0);
  CHECK(z.closed_form == 0.0);
  WindowField shear;
  shear.field = shear_flow(GridSpec{16});
  shear.radius = kPi;
  CHECK_THROWS_AS(profile_energy_identity(candidate_of(shear, 1.0), 1.0), DomainError);
}

TEST_CASE("candidate validation") {
  const WindowField tmpl = gaussian_vortex_template(16, kPi, 0.8, 1);
  CHECK_NOTHROW(candidate_of(tmpl, 1.0).validate());
  WindowField bad = tmpl;
  bad.field.comp[0][bad.field.grid.spectral_index(1, 0, 0)] += Complex(1.0, 0.0);
  CHECK_THROWS_AS(candidate_of(bad, 1.0).validate(), DomainError);
  CHECK(parse_provenance(to_string(Provenance::synthesized)) == Provenance::synthesized);
}
