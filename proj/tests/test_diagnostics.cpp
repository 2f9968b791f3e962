#include <cmath>

#include "bulb/diagnostics.hpp"
#include "bulb/errors.hpp"
#include "bulb/initial.hpp"
#include "bulb/spectral.hpp"
#include "doctest.h"

using namespace bulb;

namespace {

TrajectoryLog power_log(double C, double T, double kappa, int rows, double t_last) {
  TrajectoryLog log({2.0});
  for (int i = 0; i < rows; ++i) {
    LogRow r;
    r.t = t_last * i / (rows - 1);
    r.grad_sup = C / std::pow(T - r.t, kappa);
    r.omega_sup = r.grad_sup;
    r.omega_lp = {r.grad_sup};
    log.append(r);
  }
  return log;
}

}  // namespace

TEST_CASE("matrix norm conventions") {
  const Mat3 m{{{1.0, -2.0, 0.0}, {0.0, 3.0, 0.0}, {0.0, 0.0, -4.0}}};
  CHECK(matrix_norm(m, GradNorm::frobenius) == doctest::Approx(std::sqrt(30.0)));
  CHECK(matrix_norm(m, GradNorm::max_row_sum) == doctest::Approx(4.0));
  CHECK(matrix_norm(m, GradNorm::entry_sum) == doctest::Approx(10.0));
  CHECK(parse_grad_norm(to_string(GradNorm::entry_sum)) == GradNorm::entry_sum);
  CHECK_THROWS_AS(parse_grad_norm("spectral"), DomainError);
}

TEST_CASE("lp norms of a constant field") {
  const GridSpec g{16};
  PhysicalField f = PhysicalField::zeros(g);
  for (std::size_t i = 0; i < g.points(); ++i) {
    f.comp[0][i] = 3.0;
    f.comp[1][i] = 4.0;
  }
  // |f| = 5 everywhere on a box of volume L^3.
  for (double p : {1.0, 2.0, 3.5}) CHECK(lp_norm(f, p) == doctest::Approx(5.0 * std::pow(g.volume(), 1.0 / p)).epsilon(1e-13));
  CHECK(lp_norm(f, kInfinity) == 5.0);
}

TEST_CASE("gradient and vorticity of the Taylor-Green field") {
  // Analytic gradient of v = (sin x cos y cos z, -cos x sin y cos z, 0), maximised over the lattice.
  const GridSpec g{32};
  const SpectralField v = taylor_green(g);
  double entry = 0.0, frob = 0.0;
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) {
        const double x = g.coordinate(i), y = g.coordinate(j), z = g.coordinate(k);
        const double sx = std::sin(x), cx = std::cos(x), sy = std::sin(y), cy = std::cos(y), sz = std::sin(z),
                     cz = std::cos(z);
        const double d[6] = {cx * cy * cz, -sx * sy * cz, -sx * cy * sz, sx * sy * cz, -cx * cy * cz, cx * sy * sz};
        double e = 0.0, f = 0.0;
        for (double a : d) {
          e += std::abs(a);
          f += a * a;
        }
        entry = std::max(entry, e);
        frob = std::max(frob, std::sqrt(f));
      }
  CHECK(grad_sup(v, GradNorm::entry_sum).value == doctest::Approx(entry).epsilon(1e-12));
  CHECK(grad_sup(v, GradNorm::frobenius).value == doctest::Approx(frob).epsilon(1e-12));
  // omega = (-cos x sin y sin z, -sin x cos y sin z, 2 sin x sin y cos z) peaks at 2.
  const LogRow r = measure(v, 0.0, DiagnosticsOptions{{2.0, kInfinity}, GradNorm::entry_sum, 0.8});
  CHECK(r.omega_sup == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.energy == doctest::Approx(std::pow(kTwoPi, 3) / 8.0).epsilon(1e-13));
  CHECK(r.omega_lp.back() == r.omega_sup);
}

TEST_CASE("blow-up estimator recovers power laws") {
  struct Case {
    double C, T, kappa;
    BlowupClass cls;
  };
  for (const Case& c : {Case{2.0, 1.0, 1.0, BlowupClass::type_I}, Case{1.0, 1.0, 2.0, BlowupClass::type_II}}) {
    const BlowupAssessment a = estimate_blowup(power_log(c.C, c.T, c.kappa, 400, 0.99));
    REQUIRE(a.T_est);
    CHECK(std::abs(*a.T_est - c.T) < 1e-4);
    CHECK(std::abs(a.kappa - c.kappa) < 1e-2);
    CHECK(a.classification == c.cls);
  }
  const BlowupAssessment flat = estimate_blowup(power_log(3.0, 1.0, 0.0, 100, 0.99));
  CHECK(flat.classification == BlowupClass::no_blowup);
  CHECK(flat.M_est == 0.0);
  CHECK(estimate_blowup(power_log(2.0, 1.0, 1.0, 4, 0.9)).classification == BlowupClass::undetermined);
}

TEST_CASE("BKM integral") {
  TrajectoryLog log({2.0});
  for (int i = 0; i <= 10; ++i) {
    LogRow r;
    r.t = 0.1 * i;
    r.omega_sup = 1.0 + r.t;
    r.omega_lp = {1.0};
    log.append(r);
  }
  CHECK(bkm_integral(log, 1.0) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(bkm_integral(log, 0.5) == doctest::Approx(0.625).epsilon(1e-14));
  CHECK(log.back().bkm_integral == doctest::Approx(1.5).epsilon(1e-14));
}
