#pragma once

#include <cstdint>

#include "bulb/grid.hpp"

namespace bulb {

/// A (sin x cos y cos z, -cos x sin y cos z, 0) in units of the box wavenumber.
SpectralField taylor_green(const GridSpec& grid, double amplitude = 1.0);

/// Arnold-Beltrami-Childress flow with unit wavenumbers; curl v = v on the 2 pi box.
SpectralField abc_flow(const GridSpec& grid, double a = 1.0, double b = 1.0, double c = 1.0);

/// amplitude * (sin y, 0, 0): a steady Euler solution.
SpectralField shear_flow(const GridSpec& grid, double amplitude = 1.0);

/// Uniform velocity (constant mean mode only).
SpectralField uniform_flow(const GridSpec& grid, const Vec3& velocity);

struct RandomFieldSpec {
  std::uint64_t seed = 1;
  int band_min = 1;  // shell radius range in mode units
  int band_max = 4;
  double amplitude = 1.0;  // target rms velocity
};

/// Mean-free solenoidal field with Gaussian coefficients on the shell band, decaying as |m|^-2.
SpectralField random_solenoidal(const GridSpec& grid, const RandomFieldSpec& spec);

/// Planar field (u1(x, y), u2(x, y), 0) from a random stream function; its stretching term vanishes.
SpectralField random_planar(const GridSpec& grid, const RandomFieldSpec& spec);

/// Samples fn(x, y, z) -> Vec3 at the lattice points (x_i = i h) and transforms.
template <class Fn>
SpectralField sample_field(const GridSpec& grid, Fn&& fn);

}  // namespace bulb

#include "bulb/spectral.hpp"

namespace bulb {

template <class Fn>
SpectralField sample_field(const GridSpec& grid, Fn&& fn) {
  grid.validate();
  PhysicalField f = PhysicalField::zeros(grid);
  const double h = grid.spacing();
  for (int k = 0; k < grid.n; ++k)
    for (int j = 0; j < grid.n; ++j)
      for (int i = 0; i < grid.n; ++i) {
        const Vec3 v = fn(i * h, j * h, k * h);
        const std::size_t idx = grid.physical_index(i, j, k);
        for (int d = 0; d < 3; ++d) f.comp[d][idx] = v[d];
      }
  return to_spectral(f);
}

}  // namespace bulb
