#include "bulb/point_eval.hpp"

#include <algorithm>
#include <cmath>

#include "bulb/spectral.hpp"

namespace bulb {

namespace {

struct Band {
  int bx = 0, by = 0, bz = 0;
};

Band nonzero_band(const SpectralField& f) {
  Band b;
  for_each_mode(f.grid, [&](std::size_t idx, int mx, int my, int mz) {
    if (f.comp[0][idx] == Complex{} && f.comp[1][idx] == Complex{} && f.comp[2][idx] == Complex{}) {
      return;
    }
    b.bx = std::max(b.bx, mx);
    b.by = std::max(b.by, std::abs(my));
    b.bz = std::max(b.bz, std::abs(mz));
  });
  return b;
}

std::vector<int> full_axis_modes(const GridSpec& g, int bound) {
  std::vector<int> modes;
  for (int j = 0; j < g.n; ++j) {
    const int m = g.signed_mode(j);
    if (std::abs(m) <= bound) modes.push_back(m);
  }
  return modes;
}

int axis_index(const GridSpec& g, int m) { return m < 0 ? m + g.n : m; }

Complex phase_factor(const GridSpec& g, int m, double x) {
  const double theta = m * g.wavenumber_unit() * x;
  if (std::abs(m) == g.n / 2) return {std::cos(theta), 0.0};
  return {std::cos(theta), std::sin(theta)};
}

}  // namespace

PointEvaluator::PointEvaluator(const SpectralField& f) : grid_(f.grid) {
  const Band b = nonzero_band(f);
  for (int m = 0; m <= b.bx; ++m) mx_.push_back(m);
  my_ = full_axis_modes(grid_, b.by);
  mz_ = full_axis_modes(grid_, b.bz);
  const std::size_t nx = mx_.size(), ny = my_.size(), nz = mz_.size();
  for (int d = 0; d < 3; ++d) {
    auto& c = coef_[d];
    c.resize(nx * ny * nz);
    for (std::size_t iz = 0; iz < nz; ++iz)
      for (std::size_t iy = 0; iy < ny; ++iy)
        for (std::size_t ix = 0; ix < nx; ++ix) {
          const std::size_t src =
              grid_.spectral_index(mx_[ix], axis_index(grid_, my_[iy]), axis_index(grid_, mz_[iz]));
          c[(iz * ny + iy) * nx + ix] = grid_.parseval_weight(mx_[ix]) * f.comp[d][src];
        }
  }
}

PointEvaluator::AxisTable PointEvaluator::axis_table(const std::vector<int>& modes,
                                                     double coordinate) const {
  AxisTable t;
  t.phase.reserve(modes.size());
  t.dphase.reserve(modes.size());
  for (int m : modes) {
    const Complex p = phase_factor(grid_, m, coordinate);
    t.phase.push_back(p);
    t.dphase.push_back(Complex{0.0, grid_.derivative_wavenumber(m)} * p);
  }
  return t;
}

Vec3 PointEvaluator::value(const Vec3& x) const {
  const AxisTable tx = axis_table(mx_, x[0]);
  const AxisTable ty = axis_table(my_, x[1]);
  const AxisTable tz = axis_table(mz_, x[2]);
  const std::size_t nx = mx_.size(), ny = my_.size(), nz = mz_.size();
  Vec3 out{};
  for (int d = 0; d < 3; ++d) {
    const auto& c = coef_[d];
    Complex total{};
    for (std::size_t iz = 0; iz < nz; ++iz) {
      Complex zsum{};
      for (std::size_t iy = 0; iy < ny; ++iy) {
        const Complex* row = &c[(iz * ny + iy) * nx];
        Complex s{};
        for (std::size_t ix = 0; ix < nx; ++ix) s += row[ix] * tx.phase[ix];
        zsum += s * ty.phase[iy];
      }
      total += zsum * tz.phase[iz];
    }
    out[d] = total.real();
  }
  return out;
}

PointSample PointEvaluator::sample(const Vec3& x) const {
  const AxisTable tx = axis_table(mx_, x[0]);
  const AxisTable ty = axis_table(my_, x[1]);
  const AxisTable tz = axis_table(mz_, x[2]);
  const std::size_t nx = mx_.size(), ny = my_.size(), nz = mz_.size();
  PointSample out;
  for (int d = 0; d < 3; ++d) {
    const auto& c = coef_[d];
    Complex v{}, gx{}, gy{}, gz{};
    for (std::size_t iz = 0; iz < nz; ++iz) {
      Complex z0{}, zx{}, zy{};
      for (std::size_t iy = 0; iy < ny; ++iy) {
        const Complex* row = &c[(iz * ny + iy) * nx];
        Complex s0{}, sx{};
        for (std::size_t ix = 0; ix < nx; ++ix) {
          s0 += row[ix] * tx.phase[ix];
          sx += row[ix] * tx.dphase[ix];
        }
        z0 += s0 * ty.phase[iy];
        zx += sx * ty.phase[iy];
        zy += s0 * ty.dphase[iy];
      }
      v += z0 * tz.phase[iz];
      gx += zx * tz.phase[iz];
      gy += zy * tz.phase[iz];
      gz += z0 * tz.dphase[iz];
    }
    out.value[d] = v.real();
    out.gradient[0][d] = gx.real();
    out.gradient[1][d] = gy.real();
    out.gradient[2][d] = gz.real();
  }
  return out;
}

std::vector<Vec3> point_eval(const SpectralField& f, std::span<const Vec3> points) {
  const PointEvaluator eval(f);
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const Vec3& p : points) out.push_back(eval.value(p));
  return out;
}

std::array<std::vector<double>, 3> evaluate_on_tensor_grid(const SpectralField& f,
                                                           std::span<const double> xs,
                                                           std::span<const double> ys,
                                                           std::span<const double> zs) {
  const GridSpec& g = f.grid;
  const Band b = nonzero_band(f);
  std::vector<int> mx;
  for (int m = 0; m <= b.bx; ++m) mx.push_back(m);
  const std::vector<int> my = full_axis_modes(g, b.by);
  const std::vector<int> mz = full_axis_modes(g, b.bz);
  const std::size_t bx = mx.size(), by = my.size(), bz = mz.size();
  const std::size_t px = xs.size(), py = ys.size(), pz = zs.size();

  auto table = [&](const std::vector<int>& modes, std::span<const double> pts) {
    std::vector<Complex> t(modes.size() * pts.size());
    for (std::size_t p = 0; p < pts.size(); ++p)
      for (std::size_t m = 0; m < modes.size(); ++m) t[p * modes.size() + m] = phase_factor(g, modes[m], pts[p]);
    return t;
  };
  const auto tx = table(mx, xs), ty = table(my, ys), tz = table(mz, zs);

  std::array<std::vector<double>, 3> out;
  for (int d = 0; d < 3; ++d) {
    // Contract x, then y, then z; intermediate layouts keep the point index fastest.
    std::vector<Complex> a(bz * by * px);
    for (std::size_t iz = 0; iz < bz; ++iz)
      for (std::size_t iy = 0; iy < by; ++iy) {
        const std::size_t jy = axis_index(g, my[iy]), kz = axis_index(g, mz[iz]);
        for (std::size_t p = 0; p < px; ++p) {
          Complex s{};
          for (std::size_t ix = 0; ix < bx; ++ix) {
            s += g.parseval_weight(mx[ix]) * f.comp[d][g.spectral_index(mx[ix], jy, kz)] * tx[p * bx + ix];
          }
          a[(iz * by + iy) * px + p] = s;
        }
      }
    std::vector<Complex> bsum(bz * py * px);
    for (std::size_t iz = 0; iz < bz; ++iz)
      for (std::size_t q = 0; q < py; ++q) {
        Complex* dst = &bsum[(iz * py + q) * px];
        for (std::size_t iy = 0; iy < by; ++iy) {
          const Complex w = ty[q * by + iy];
          const Complex* src = &a[(iz * by + iy) * px];
          for (std::size_t p = 0; p < px; ++p) dst[p] += src[p] * w;
        }
      }
    auto& res = out[d];
    res.assign(px * py * pz, 0.0);
    for (std::size_t r = 0; r < pz; ++r) {
      for (std::size_t iz = 0; iz < bz; ++iz) {
        const Complex w = tz[r * bz + iz];
        const Complex* src = &bsum[iz * py * px];
        double* dst = &res[r * py * px];
        for (std::size_t k = 0; k < py * px; ++k) dst[k] += (src[k] * w).real();
      }
    }
  }
  return out;
}

}  // namespace bulb
