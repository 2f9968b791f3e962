#pragma once

#include "bulb/grid.hpp"

namespace bulb {

/// Loops over the half spectrum calling fn(index, mx, my, mz) with signed mode numbers.
template <class Fn>
void for_each_mode(const GridSpec& g, Fn&& fn) {
  const int n = g.n;
  const int h = g.half();
  std::size_t idx = 0;
  for (int kz = 0; kz < n; ++kz) {
    const int mz = g.signed_mode(kz);
    for (int jy = 0; jy < n; ++jy) {
      const int my = g.signed_mode(jy);
      for (int mx = 0; mx < h; ++mx, ++idx) fn(idx, mx, my, mz);
    }
  }
}

// Transforms.
SpectralField to_spectral(const PhysicalField& f);
PhysicalField to_physical(const SpectralField& f);
SpectralScalar to_spectral(const ScalarLattice& f);
ScalarLattice to_physical(const SpectralScalar& f);
PhysicalTensor to_physical(const SpectralTensor& t);

// Differential operators (exact multiplication by i k; Nyquist modes differentiate to zero).
SpectralTensor gradient(const SpectralField& f);
SpectralField curl(const SpectralField& f);
SpectralScalar divergence(const SpectralField& f);
SpectralField laplacian(const SpectralField& f);

/// Orthogonal projection onto divergence-free fields; the mean mode passes through.
SpectralField leray_project(const SpectralField& f);

/// Mean-free, divergence-free velocity whose curl is omega.
/// Throws DomainError when omega has a nonzero mean or is not solenoidal
/// (divergence above `tolerance` times the largest coefficient).
SpectralField biot_savart(const SpectralField& omega, double tolerance = 1e-10);

/// Zeroes every mode with some |m_i| above the dealiasing cutoff.
SpectralField dealias(SpectralField f);
void dealias_in_place(SpectralField& f);

/// Spectral resampling to a lattice of n_new points per axis on the same domain.
/// Padding splits Nyquist coefficients symmetrically so the trigonometric
/// interpolant is preserved exactly; truncation drops the removed band.
SpectralField resample(const SpectralField& f, int n_new);

/// Mean over the box of f.g (exact Parseval sum over the half spectrum).
double mean_inner(const SpectralField& a, const SpectralField& b);
/// Integral over the box of f.g.
double box_inner(const SpectralField& a, const SpectralField& b);
/// Box L2 norm computed from coefficients.
double spectral_l2_norm(const SpectralField& f);
/// Max modulus of i k . f over all modes.
double max_divergence(const SpectralField& f);

/// Fraction of sum |k|^2 |c|^2 carried by modes whose largest |m_i| exceeds
/// band_start * cutoff (the outer part of the retained band).
double spectral_tail_fraction(const SpectralField& velocity, double band_start);

}  // namespace bulb
