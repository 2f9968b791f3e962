#include <cmath>
#include <random>

#include "bulb/errors.hpp"
#include "bulb/initial.hpp"
#include "bulb/point_eval.hpp"
#include "bulb/spectral.hpp"
#include "doctest.h"

using namespace bulb;

namespace {

PhysicalField white_noise(const GridSpec& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PhysicalField f = PhysicalField::zeros(g);
  for (auto& c : f.comp)
    for (double& v : c) v = u(rng);
  return f;
}

double max_diff(const PhysicalField& a, const PhysicalField& b) {
  double m = 0.0;
  for (int d = 0; d < 3; ++d)
    for (std::size_t i = 0; i < a.comp[d].size(); ++i) m = std::max(m, std::abs(a.comp[d][i] - b.comp[d][i]));
  return m;
}

double max_abs(const SpectralScalar& s) {
  double m = 0.0;
  for (const auto& c : s.coeffs) m = std::max(m, std::abs(c));
  return m;
}

double physical_l2(const PhysicalField& f) {
  double s = 0.0;
  for (const auto& c : f.comp)
    for (double v : c) s += v * v;
  return std::sqrt(s * f.grid.cell_volume());
}

SpectralField random_field(const GridSpec& g, unsigned seed) { return to_spectral(white_noise(g, seed)); }

}  // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(GridSpec{7}.validate(), DomainError);
  CHECK_THROWS_AS(GridSpec{6}.validate(), DomainError);
  CHECK_THROWS_AS((GridSpec{16, -1.0}.validate()), DomainError);
  CHECK_THROWS_AS((GridSpec{16, kTwoPi, 0.0}.validate()), DomainError);
  CHECK_NOTHROW(GridSpec{12}.validate());
}

TEST_CASE("transforms") {
  const GridSpec g{16};
  SUBCASE("zero field") {
    const SpectralField z = to_spectral(PhysicalField::zeros(g));
    CHECK(z.max_abs() == 0.0);
  }
  SUBCASE("single mode") {
    const SpectralField f = sample_field(g, [](double x, double, double) { return Vec3{std::sin(x), 0, 0}; });
    // Half spectrum stores only k = +1: coefficient -i/2.
    const std::size_t k1 = g.spectral_index(1, 0, 0);
    CHECK(std::abs(f.comp[0][k1] - Complex{0.0, -0.5}) < 1e-15);
    double others = 0.0;
    for (std::size_t i = 0; i < f.comp[0].size(); ++i)
      if (i != k1) others = std::max(others, std::abs(f.comp[0][i]));
    CHECK(others < 1e-13);
    CHECK(f.comp[1].size() == g.modes());
  }
  SUBCASE("round trip and Parseval") {
    const PhysicalField f = white_noise(g, 3);
    const SpectralField s = to_spectral(f);
    CHECK(max_diff(f, to_physical(s)) < 1e-12 * f.max_abs());
    const double phys = physical_l2(f);
    CHECK(std::abs(spectral_l2_norm(s) - phys) < 1e-12 * phys);
  }
}

TEST_CASE("differential operators") {
  const GridSpec g{16};
  SUBCASE("curl of shear") {
    const SpectralField w = curl(shear_flow(g));
    const SpectralField expect =
        sample_field(g, [](double, double y, double) { return Vec3{0, 0, -std::cos(y)}; });
    SpectralField diff = w;
    diff.add_scaled(expect, -1.0);
    CHECK(diff.max_abs() < 1e-15);
  }
  SUBCASE("constant field") {
    const SpectralField c = uniform_flow(g, {1.0, -2.0, 3.0});
    const SpectralTensor t = gradient(c);
    double m = 0.0;
    for (const auto& row : t.comp)
      for (const auto& comp : row)
        for (const auto& v : comp) m = std::max(m, std::abs(v));
    CHECK(m == 0.0);
    CHECK(max_abs(divergence(c)) == 0.0);
  }
  SUBCASE("div curl vanishes") {
    const SpectralField f = random_field(g, 5);
    CHECK(max_abs(divergence(curl(f))) < 1e-12 * spectral_l2_norm(f));
  }
  SUBCASE("gradient trace equals divergence") {
    const SpectralField f = random_field(g, 6);
    const SpectralTensor t = gradient(f);
    const SpectralScalar d = divergence(f);
    double m = 0.0;
    for (std::size_t i = 0; i < g.modes(); ++i)
      m = std::max(m, std::abs(t.comp[0][0][i] + t.comp[1][1][i] + t.comp[2][2][i] - d.coeffs[i]));
    CHECK(m < 1e-12);
  }
}

TEST_CASE("leray projection") {
  const GridSpec g{16};
  SUBCASE("divergence-free input unchanged") {
    const SpectralField f = taylor_green(g);
    SpectralField diff = leray_project(f);
    diff.add_scaled(f, -1.0);
    CHECK(diff.max_abs() < 1e-13 * f.max_abs());
  }
  SUBCASE("pure gradient removed") {
    const SpectralField f = sample_field(g, [](double x, double, double) { return Vec3{std::cos(x), 0, 0}; });
    CHECK(leray_project(f).max_abs() < 1e-15);
  }
  SUBCASE("Pythagoras, idempotence, solenoidality") {
    const SpectralField f = random_field(g, 7);
    const SpectralField p = leray_project(f);
    SpectralField q = f;
    q.add_scaled(p, -1.0);
    const double lhs = box_inner(f, f);
    CHECK(std::abs(lhs - box_inner(p, p) - box_inner(q, q)) < 1e-12 * lhs);
    SpectralField pp = leray_project(p);
    pp.add_scaled(p, -1.0);
    CHECK(pp.max_abs() < 1e-14 * p.max_abs());
    CHECK(max_divergence(p) < 1e-12 * p.max_abs());
    CHECK(p.comp[0][0] == f.comp[0][0]);
  }
}

TEST_CASE("biot-savart") {
  const GridSpec g{16};
  SUBCASE("analytic inverse") {
    const SpectralField w = sample_field(g, [](double, double y, double) { return Vec3{0, 0, -std::cos(y)}; });
    SpectralField v = biot_savart(w);
    v.add_scaled(shear_flow(g), -1.0);
    CHECK(v.max_abs() < 1e-15);
  }
  SUBCASE("zero") { CHECK(biot_savart(SpectralField::zeros(g)).max_abs() == 0.0); }
  SUBCASE("round trips on solenoidal fields") {
    const SpectralField v = random_solenoidal(g, {11, 1, 5, 1.0});
    const SpectralField w = curl(v);
    SpectralField a = curl(biot_savart(w));
    a.add_scaled(w, -1.0);
    CHECK(spectral_l2_norm(a) < 1e-12 * spectral_l2_norm(w));
    SpectralField b = biot_savart(w);
    b.add_scaled(v, -1.0);
    CHECK(spectral_l2_norm(b) < 1e-12 * spectral_l2_norm(v));
  }
  SUBCASE("rejects bad input") {
    SpectralField mean = uniform_flow(g, {1, 0, 0});
    CHECK_THROWS_AS(biot_savart(mean), DomainError);
    const SpectralField grad = sample_field(g, [](double x, double, double) { return Vec3{std::cos(x), 0, 0}; });
    CHECK_THROWS_AS(biot_savart(grad), DomainError);
  }
}

TEST_CASE("dealias") {
  const GridSpec g{24};
  SUBCASE("low band untouched") {
    const SpectralField f = random_solenoidal(g, {2, 1, 6, 1.0});
    SpectralField d = dealias(f);
    d.add_scaled(f, -1.0);
    CHECK(d.max_abs() == 0.0);
  }
  SUBCASE("high mode removed") {
    const int m = g.n / 2 - 1;
    SpectralField f = SpectralField::zeros(g);
    f.comp[0][g.spectral_index(m, 0, 0)] = Complex{0.0, -0.5};
    f.comp[2][g.spectral_index(0, g.n - m, 0)] = Complex{0.3, 0.1};
    CHECK(dealias(f).max_abs() == 0.0);
  }
  SUBCASE("idempotent") {
    const SpectralField once = dealias(random_field(g, 8));
    const SpectralField twice = dealias(once);
    for (int d = 0; d < 3; ++d) CHECK(once.comp[d] == twice.comp[d]);
  }
}

TEST_CASE("point evaluation") {
  const GridSpec g{16};
  SUBCASE("analytic value") {
    const SpectralField f = sample_field(g, [](double x, double, double) { return Vec3{std::sin(x), 0, 0}; });
    const Vec3 v = PointEvaluator(f).value({kPi / 2, 0, 0});
    CHECK(std::abs(v[0] - 1.0) < 1e-14);
    CHECK(std::abs(v[1]) < 1e-15);
  }
  SUBCASE("lattice points reproduce the physical values") {
    const PhysicalField f = white_noise(g, 9);
    const PointEvaluator eval(to_spectral(f));
    const double h = g.spacing();
    double err = 0.0;
    for (int k = 0; k < g.n; k += 3)
      for (int j = 0; j < g.n; j += 5)
        for (int i = 0; i < g.n; ++i) {
          const Vec3 v = eval.value({i * h, j * h, k * h});
          for (int d = 0; d < 3; ++d) err = std::max(err, std::abs(v[d] - f.comp[d][g.physical_index(i, j, k)]));
        }
    CHECK(err < 1e-12 * f.max_abs());
  }
  SUBCASE("off-lattice points match the refined lattice") {
    const SpectralField f = random_field(g, 10);  // includes Nyquist content
    const GridSpec fine{2 * g.n};
    const PhysicalField ref = to_physical(resample(f, fine.n));
    const PointEvaluator eval(f);
    std::mt19937 rng(4);
    std::uniform_int_distribution<int> pick(0, g.n - 1);
    const double h = fine.spacing();
    double err = 0.0;
    for (int s = 0; s < 50; ++s) {
      const int i = 2 * pick(rng) + 1, j = 2 * pick(rng) + 1, k = 2 * pick(rng);
      const Vec3 v = eval.value({i * h, j * h, k * h});
      for (int d = 0; d < 3; ++d) err = std::max(err, std::abs(v[d] - ref.comp[d][fine.physical_index(i, j, k)]));
    }
    CHECK(err < 1e-10);
  }
  SUBCASE("gradient sample matches spectral gradient on the lattice") {
    const SpectralField f = random_solenoidal(g, {12, 1, 5, 1.0});
    const PhysicalTensor t = to_physical(gradient(f));
    const PointEvaluator eval(f);
    const double h = g.spacing();
    const PointSample s = eval.sample({3 * h, 7 * h, 11 * h});
    const std::size_t idx = g.physical_index(3, 7, 11);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(std::abs(s.gradient[i][j] - t.comp[i][j][idx]) < 1e-12);
  }
  SUBCASE("tensor grid agrees with pointwise evaluation") {
    const SpectralField f = random_field(g, 13);
    const std::vector<double> xs{0.1, 1.3, 5.9}, ys{-0.4, 2.2}, zs{0.0, 0.7, 3.3, 6.0};
    const auto grid_vals = evaluate_on_tensor_grid(f, xs, ys, zs);
    const PointEvaluator eval(f);
    double err = 0.0;
    for (std::size_t k = 0; k < zs.size(); ++k)
      for (std::size_t j = 0; j < ys.size(); ++j)
        for (std::size_t i = 0; i < xs.size(); ++i) {
          const Vec3 v = eval.value({xs[i], ys[j], zs[k]});
          for (int d = 0; d < 3; ++d)
            err = std::max(err, std::abs(v[d] - grid_vals[d][(k * ys.size() + j) * xs.size() + i]));
        }
    CHECK(err < 1e-12);
  }
  SUBCASE("linearity") {
    const SpectralField a = random_field(g, 14), b = random_field(g, 15);
    SpectralField c = a;
    c.add_scaled(b, 2.5);
    const Vec3 x{0.3, 4.1, 2.7};
    const Vec3 va = PointEvaluator(a).value(x), vb = PointEvaluator(b).value(x), vc = PointEvaluator(c).value(x);
    for (int d = 0; d < 3; ++d) CHECK(std::abs(vc[d] - va[d] - 2.5 * vb[d]) < 1e-12);
  }
}

TEST_CASE("resample") {
  const GridSpec g{16};
  const SpectralField f = random_field(g, 16);
  SUBCASE("pad then truncate restores the interior band") {
    const SpectralField back = resample(resample(f, 32), 16);
    double err = 0.0;
    for_each_mode(g, [&](std::size_t idx, int mx, int my, int mz) {
      const bool nyquist = mx == 8 || std::abs(my) == 8 || std::abs(mz) == 8;
      for (int d = 0; d < 3; ++d) err = std::max(err, std::abs(back.comp[d][idx] - (nyquist ? Complex{} : f.comp[d][idx])));
    });
    CHECK(err < 1e-15);
  }
  SUBCASE("padding preserves lattice values") {
    const PhysicalField coarse = to_physical(f);
    const PhysicalField fine = to_physical(resample(f, 32));
    double err = 0.0;
    for (int k = 0; k < 16; ++k)
      for (int j = 0; j < 16; ++j)
        for (int i = 0; i < 16; ++i)
          for (int d = 0; d < 3; ++d)
            err = std::max(err, std::abs(coarse.comp[d][g.physical_index(i, j, k)] -
                                         fine.comp[d][GridSpec{32}.physical_index(2 * i, 2 * j, 2 * k)]));
    CHECK(err < 1e-12);
  }
}
