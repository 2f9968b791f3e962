#include "bulb/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bulb/errors.hpp"

namespace bulb {

void GridSpec::validate() const {
  if (n < 8 || n % 2 != 0) {
    throw DomainError("grid: n must be even and >= 8 (got " + std::to_string(n) + ")");
  }
  if (!(domain_length > 0.0) || !std::isfinite(domain_length)) {
    throw DomainError("grid: domain_length must be positive");
  }
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0)) {
    throw DomainError("grid: dealias_fraction must lie in (0, 1]");
  }
}

int GridSpec::dealias_cutoff() const {
  // Small epsilon so that fraction 1 keeps the Nyquist index exactly.
  return static_cast<int>(std::floor(dealias_fraction * (n / 2) + 1e-9));
}

bool GridSpec::same_lattice(const GridSpec& other) const {
  return n == other.n && domain_length == other.domain_length;
}

ScalarLattice ScalarLattice::zeros(const GridSpec& grid) {
  return {grid, std::vector<double>(grid.points(), 0.0)};
}

SpectralScalar SpectralScalar::zeros(const GridSpec& grid) {
  return {grid, std::vector<Complex>(grid.modes(), Complex{})};
}

PhysicalField PhysicalField::zeros(const GridSpec& grid) {
  PhysicalField f{grid, {}};
  for (auto& c : f.comp) c.assign(grid.points(), 0.0);
  return f;
}

double PhysicalField::max_abs() const {
  double m = 0.0;
  for (const auto& c : comp)
    for (double v : c) m = std::max(m, std::abs(v));
  return m;
}

SpectralField SpectralField::zeros(const GridSpec& grid) {
  SpectralField f{grid, {}};
  for (auto& c : f.comp) c.assign(grid.modes(), Complex{});
  return f;
}

double SpectralField::max_abs() const {
  double m = 0.0;
  for (const auto& c : comp)
    for (const Complex& v : c) m = std::max(m, std::abs(v));
  return m;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  return add_scaled(other, 1.0);
}

SpectralField& SpectralField::operator*=(double factor) {
  for (auto& c : comp)
    for (auto& v : c) v *= factor;
  return *this;
}

SpectralField& SpectralField::add_scaled(const SpectralField& other, double factor) {
  if (other.grid.n != grid.n) throw DomainError("field arithmetic on mismatched grids");
  for (int d = 0; d < 3; ++d) {
    auto& a = comp[d];
    const auto& b = other.comp[d];
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += factor * b[i];
  }
  return *this;
}

}  // namespace bulb
