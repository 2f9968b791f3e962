#pragma once

#include <span>
#include <vector>

#include "bulb/grid.hpp"

namespace bulb {

struct PointSample {
  Vec3 value{};
  Mat3 gradient{};  // gradient[i][j] = d f_j / d x_i
};

/// Trigonometric interpolation of a spectral field at arbitrary points.
///
/// The sum runs over the smallest box of modes that holds every nonzero
/// coefficient. Nyquist modes are evaluated as cos(N x), which reproduces the
/// lattice values and keeps the interpolant real. The gradient is the
/// interpolant of the spectral gradient, so it agrees with gradient() on the lattice.
class PointEvaluator {
 public:
  explicit PointEvaluator(const SpectralField& f);

  const GridSpec& grid() const { return grid_; }
  Vec3 value(const Vec3& x) const;
  PointSample sample(const Vec3& x) const;

 private:
  struct AxisTable {
    std::vector<Complex> phase;
    std::vector<Complex> dphase;
  };
  AxisTable axis_table(const std::vector<int>& modes, double coordinate) const;

  GridSpec grid_;
  std::vector<int> mx_, my_, mz_;  // signed modes inside the band
  std::array<std::vector<Complex>, 3> coef_;  // Parseval-weighted, layout (z, y, x)
};

std::vector<Vec3> point_eval(const SpectralField& f, std::span<const Vec3> points);

/// Values of f on the tensor product xs x ys x zs (x fastest), one vector per component.
std::array<std::vector<double>, 3> evaluate_on_tensor_grid(const SpectralField& f,
                                                           std::span<const double> xs,
                                                           std::span<const double> ys,
                                                           std::span<const double> zs);

}  // namespace bulb
