#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace bulb {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

using Complex = std::complex<double>;
using Vec3 = std::array<double, 3>;
/// Row i holds the derivative along axis i: m[i][j] = d f_j / d x_i.
using Mat3 = std::array<std::array<double, 3>, 3>;

/// Uniform periodic lattice of n^3 points on [0, L)^3.
///
/// Physical storage is x-fastest: index = (k*n + j)*n + i. Spectral storage is the
/// real-to-complex half spectrum with the x axis halved: index = (kz*n + ky)*(n/2+1) + kx.
/// Coordinates are interpreted as centred, i.e. lattice index i maps to i*h for i < n/2
/// and to (i-n)*h otherwise, so the origin sits at index 0.
struct GridSpec {
  int n = 32;
  double domain_length = kTwoPi;
  double dealias_fraction = 2.0 / 3.0;

  /// Throws DomainError when n < 8, n odd, L <= 0 or the fraction is outside (0, 1].
  void validate() const;

  double spacing() const { return domain_length / n; }
  double wavenumber_unit() const { return kTwoPi / domain_length; }
  double cell_volume() const { const double h = spacing(); return h * h * h; }
  double volume() const { return domain_length * domain_length * domain_length; }
  std::size_t points() const { return static_cast<std::size_t>(n) * n * n; }
  int half() const { return n / 2 + 1; }
  std::size_t modes() const { return static_cast<std::size_t>(n) * n * half(); }

  /// Largest retained |m| per axis under the dealiasing rule.
  int dealias_cutoff() const;

  /// Signed mode number for a full (y or z) axis index; the Nyquist index stays +n/2.
  int signed_mode(int index) const { return index <= n / 2 ? index : index - n; }
  /// Centred coordinate of lattice index i.
  double coordinate(int index) const { return (index < n / 2 ? index : index - n) * spacing(); }
  /// Spectral derivative wavenumber (Nyquist mode differentiates to zero).
  double derivative_wavenumber(int signed_m) const {
    return (signed_m == n / 2 || signed_m == -n / 2) ? 0.0 : signed_m * wavenumber_unit();
  }
  /// Weight of a half-spectrum x-plane in Parseval sums.
  double parseval_weight(int mx) const { return (mx == 0 || mx == n / 2) ? 1.0 : 2.0; }

  std::size_t physical_index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * n + j) * n + i;
  }
  std::size_t spectral_index(int mx, int jy, int kz) const {
    return (static_cast<std::size_t>(kz) * n + jy) * half() + mx;
  }

  bool same_lattice(const GridSpec& other) const;
};

/// Physical scalar lattice.
struct ScalarLattice {
  GridSpec grid;
  std::vector<double> values;

  static ScalarLattice zeros(const GridSpec& grid);
};

/// Half-spectrum coefficients of a real scalar; f(x) = sum_k c_k exp(i k.x).
struct SpectralScalar {
  GridSpec grid;
  std::vector<Complex> coeffs;

  static SpectralScalar zeros(const GridSpec& grid);
};

/// Three-component field sampled on the physical lattice.
struct PhysicalField {
  GridSpec grid;
  std::array<std::vector<double>, 3> comp;

  static PhysicalField zeros(const GridSpec& grid);
  double max_abs() const;
};

/// Three-component field in the half-spectrum representation.
struct SpectralField {
  GridSpec grid;
  std::array<std::vector<Complex>, 3> comp;

  static SpectralField zeros(const GridSpec& grid);
  double max_abs() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator*=(double factor);
  /// this += factor * other
  SpectralField& add_scaled(const SpectralField& other, double factor);
};

/// Gradient tensor in physical space; comp[i][j] = d f_j / d x_i.
struct PhysicalTensor {
  GridSpec grid;
  std::array<std::array<std::vector<double>, 3>, 3> comp;
};

/// Gradient tensor in spectral space; comp[i][j] = i k_i c_j.
struct SpectralTensor {
  GridSpec grid;
  std::array<std::array<std::vector<Complex>, 3>, 3> comp;
};

}  // namespace bulb
