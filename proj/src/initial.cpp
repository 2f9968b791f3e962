#include "bulb/initial.hpp"

#include <cmath>
#include <random>

#include "bulb/errors.hpp"
#include "bulb/spectral.hpp"

namespace bulb {

SpectralField taylor_green(const GridSpec& grid, double amplitude) {
  const double k = grid.wavenumber_unit();
  return sample_field(grid, [&](double x, double y, double z) {
    return Vec3{amplitude * std::sin(k * x) * std::cos(k * y) * std::cos(k * z),
                -amplitude * std::cos(k * x) * std::sin(k * y) * std::cos(k * z), 0.0};
  });
}

SpectralField abc_flow(const GridSpec& grid, double a, double b, double c) {
  const double k = grid.wavenumber_unit();
  return sample_field(grid, [&](double x, double y, double z) {
    return Vec3{a * std::sin(k * z) + c * std::cos(k * y), b * std::sin(k * x) + a * std::cos(k * z),
                c * std::sin(k * y) + b * std::cos(k * x)};
  });
}

SpectralField shear_flow(const GridSpec& grid, double amplitude) {
  const double k = grid.wavenumber_unit();
  return sample_field(grid, [&](double, double y, double) {
    return Vec3{amplitude * std::sin(k * y), 0.0, 0.0};
  });
}

SpectralField uniform_flow(const GridSpec& grid, const Vec3& velocity) {
  grid.validate();
  SpectralField f = SpectralField::zeros(grid);
  for (int d = 0; d < 3; ++d) f.comp[d][0] = velocity[d];
  return f;
}

namespace {

void check_band(const GridSpec& grid, const RandomFieldSpec& spec) {
  grid.validate();
  if (spec.band_min < 1 || spec.band_max < spec.band_min) {
    throw DomainError("random field: band must satisfy 1 <= band_min <= band_max");
  }
  if (spec.band_max > grid.dealias_cutoff()) {
    throw DomainError("random field: band_max exceeds the dealiasing cutoff");
  }
  if (!(spec.amplitude >= 0.0)) throw DomainError("random field: amplitude must be >= 0");
}

// Round trip through physical space enforces conjugate symmetry of the half spectrum;
// the round-off it leaves outside the band is cleared so the result is exactly band-limited.
SpectralField symmetrize(const SpectralField& f, const RandomFieldSpec& spec, bool planar) {
  SpectralField out = to_spectral(to_physical(f));
  for_each_mode(out.grid, [&](std::size_t idx, int mx, int my, int mz) {
    const double r = std::sqrt(double(mx) * mx + double(my) * my + double(mz) * mz);
    if (r < spec.band_min || r > spec.band_max || (planar && mz != 0)) {
      for (auto& c : out.comp) c[idx] = Complex{};
    }
  });
  return out;
}

void normalize_rms(SpectralField& f, double amplitude) {
  const double rms = std::sqrt(mean_inner(f, f));
  if (rms > 0.0) f *= amplitude / rms;
}

}  // namespace

SpectralField random_solenoidal(const GridSpec& grid, const RandomFieldSpec& spec) {
  check_band(grid, spec);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField f = SpectralField::zeros(grid);
  for_each_mode(grid, [&](std::size_t idx, int mx, int my, int mz) {
    const double r = std::sqrt(double(mx) * mx + double(my) * my + double(mz) * mz);
    if (r < spec.band_min || r > spec.band_max) return;
    const double w = 1.0 / (r * r);
    for (int d = 0; d < 3; ++d) {
      const double re = normal(rng), im = normal(rng);
      f.comp[d][idx] = w * Complex{re, im};
    }
  });
  f = leray_project(symmetrize(f, spec, false));
  for (auto& c : f.comp) c[0] = Complex{};
  normalize_rms(f, spec.amplitude);
  return f;
}

SpectralField random_planar(const GridSpec& grid, const RandomFieldSpec& spec) {
  check_band(grid, spec);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  // Stream function psi(x, y); v = (d psi/dy, -d psi/dx, 0).
  SpectralField f = SpectralField::zeros(grid);
  for_each_mode(grid, [&](std::size_t idx, int mx, int my, int mz) {
    if (mz != 0) return;
    const double r = std::sqrt(double(mx) * mx + double(my) * my);
    if (r < spec.band_min || r > spec.band_max) return;
    const Complex psi = Complex{normal(rng), normal(rng)} / (r * r * r);
    const double kx = grid.derivative_wavenumber(mx), ky = grid.derivative_wavenumber(my);
    f.comp[0][idx] = Complex{0.0, ky} * psi;
    f.comp[1][idx] = Complex{0.0, -kx} * psi;
  });
  f = symmetrize(f, spec, true);
  normalize_rms(f, spec.amplitude);
  return f;
}

}  // namespace bulb
