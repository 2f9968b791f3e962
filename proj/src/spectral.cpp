#include "bulb/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "bulb/errors.hpp"
#include "bulb/fft.hpp"

namespace bulb {

namespace {

constexpr Complex kI{0.0, 1.0};

struct Wavevector {
  double kx, ky, kz;
  double norm2() const { return kx * kx + ky * ky + kz * kz; }
};

Wavevector effective_k(const GridSpec& g, int mx, int my, int mz) {
  return {g.derivative_wavenumber(mx), g.derivative_wavenumber(my), g.derivative_wavenumber(mz)};
}

}  // namespace

SpectralField to_spectral(const PhysicalField& f) {
  f.grid.validate();
  SpectralField out = SpectralField::zeros(f.grid);
  auto& engine = fft_engine(f.grid.n);
  for (int d = 0; d < 3; ++d) {
    if (f.comp[d].size() != f.grid.points()) throw DomainError("to_spectral: component size mismatch");
    engine.forward(f.comp[d], out.comp[d]);
  }
  return out;
}

PhysicalField to_physical(const SpectralField& f) {
  f.grid.validate();
  PhysicalField out = PhysicalField::zeros(f.grid);
  auto& engine = fft_engine(f.grid.n);
  for (int d = 0; d < 3; ++d) {
    if (f.comp[d].size() != f.grid.modes()) throw DomainError("to_physical: component size mismatch");
    engine.inverse(f.comp[d], out.comp[d]);
  }
  return out;
}

SpectralScalar to_spectral(const ScalarLattice& f) {
  f.grid.validate();
  SpectralScalar out = SpectralScalar::zeros(f.grid);
  fft_engine(f.grid.n).forward(f.values, out.coeffs);
  return out;
}

ScalarLattice to_physical(const SpectralScalar& f) {
  f.grid.validate();
  ScalarLattice out = ScalarLattice::zeros(f.grid);
  fft_engine(f.grid.n).inverse(f.coeffs, out.values);
  return out;
}

PhysicalTensor to_physical(const SpectralTensor& t) {
  PhysicalTensor out{t.grid, {}};
  auto& engine = fft_engine(t.grid.n);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      out.comp[i][j].assign(t.grid.points(), 0.0);
      engine.inverse(t.comp[i][j], out.comp[i][j]);
    }
  return out;
}

SpectralTensor gradient(const SpectralField& f) {
  const GridSpec& g = f.grid;
  SpectralTensor t{g, {}};
  for (auto& row : t.comp)
    for (auto& c : row) c.assign(g.modes(), Complex{});
  for_each_mode(g, [&](std::size_t idx, int mx, int my, int mz) {
    const Wavevector k = effective_k(g, mx, my, mz);
    const double kk[3] = {k.kx, k.ky, k.kz};
    for (int i = 0; i < 3; ++i) {
      if (kk[i] == 0.0) continue;
      for (int j = 0; j < 3; ++j) t.comp[i][j][idx] = kI * kk[i] * f.comp[j][idx];
    }
  });
  return t;
}

SpectralField curl(const SpectralField& f) {
  const GridSpec& g = f.grid;
  SpectralField out = SpectralField::zeros(g);
  for_each_mode(g, [&](std::size_t idx, int mx, int my, int mz) {
    const Wavevector k = effective_k(g, mx, my, mz);
    const Complex a = f.comp[0][idx], b = f.comp[1][idx], c = f.comp[2][idx];
    out.comp[0][idx] = kI * (k.ky * c - k.kz * b);
    out.comp[1][idx] = kI * (k.kz * a - k.kx * c);
    out.comp[2][idx] = kI * (k.kx * b - k.ky * a);
  });
  return out;
}

SpectralScalar divergence(const SpectralField& f) {
  const GridSpec& g = f.grid;
  SpectralScalar out = SpectralScalar::zeros(g);
  for_each_mode(g, [&](std::size_t idx, int mx, int my, int mz) {
    const Wavevector k = effective_k(g, mx, my, mz);
    out.coeffs[idx] = kI * (k.kx * f.comp[0][idx] + k.ky * f.comp[1][idx] + k.kz * f.comp[2][idx]);
  });
  return out;
}

SpectralField laplacian(const SpectralField& f) {
  const GridSpec& g = f.grid;
  SpectralField out = SpectralField::zeros(g);
  const double unit = g.wavenumber_unit();
  for_each_mode(g, [&](std::size_t idx, int mx, int my, int mz) {
    const double k2 = unit * unit * (double(mx) * mx + double(my) * my + double(mz) * mz);
    for (int d = 0; d < 3; ++d) out.comp[d][idx] = -k2 * f.comp[d][idx];
  });
  return out;
}

SpectralField leray_project(const SpectralField& f) {
  const GridSpec& g = f.grid;
  SpectralField out = f;
  for_each_mode(g, [&](std::size_t idx, int mx, int my, int mz) {
    const Wavevector k = effective_k(g, mx, my, mz);
    const double k2 = k.norm2();
    if (k2 == 0.0) return;
    const Complex dot = k.kx * f.comp[0][idx] + k.ky * f.comp[1][idx] + k.kz * f.comp[2][idx];
    const Complex s = dot / k2;
    out.comp[0][idx] -= s * k.kx;
    out.comp[1][idx] -= s * k.ky;
    out.comp[2][idx] -= s * k.kz;
  });
  return out;
}

SpectralField biot_savart(const SpectralField& omega, double tolerance) {
  const GridSpec& g = omega.grid;
  const double scale = std::max(omega.max_abs(), 1e-300);
  for (int d = 0; d < 3; ++d) {
    if (std::abs(omega.comp[d][0]) > tolerance * scale) {
      throw DomainError("biot_savart: vorticity has nonzero mean");
    }
  }
  if (max_divergence(omega) > tolerance * scale * g.wavenumber_unit() * g.n) {
    throw DomainError("biot_savart: vorticity is not solenoidal");
  }
  SpectralField v = SpectralField::zeros(g);
  for_each_mode(g, [&](std::size_t idx, int mx, int my, int mz) {
    const Wavevector k = effective_k(g, mx, my, mz);
    const double k2 = k.norm2();
    if (k2 == 0.0) {
      if (idx != 0) {
        for (int d = 0; d < 3; ++d)
          if (std::abs(omega.comp[d][idx]) > tolerance * scale)
            throw DomainError("biot_savart: vorticity carries an unresolvable Nyquist mode");
      }
      return;
    }
    const Complex a = omega.comp[0][idx], b = omega.comp[1][idx], c = omega.comp[2][idx];
    v.comp[0][idx] = kI * (k.ky * c - k.kz * b) / k2;
    v.comp[1][idx] = kI * (k.kz * a - k.kx * c) / k2;
    v.comp[2][idx] = kI * (k.kx * b - k.ky * a) / k2;
  });
  return v;
}

void dealias_in_place(SpectralField& f) {
  const GridSpec& g = f.grid;
  const int cut = g.dealias_cutoff();
  for_each_mode(g, [&](std::size_t idx, int mx, int my, int mz) {
    if (mx > cut || std::abs(my) > cut || std::abs(mz) > cut) {
      for (int d = 0; d < 3; ++d) f.comp[d][idx] = Complex{};
    }
  });
}

SpectralField dealias(SpectralField f) {
  dealias_in_place(f);
  return f;
}

SpectralField resample(const SpectralField& f, int n_new) {
  GridSpec gn = f.grid;
  gn.n = n_new;
  gn.validate();
  const GridSpec& go = f.grid;
  const int nyq_old = go.n / 2;
  SpectralField out = SpectralField::zeros(gn);
  auto old_index = [&](int m) { return m < 0 ? m + go.n : m; };
  for_each_mode(gn, [&](std::size_t idx, int mx, int my, int mz) {
    double factor = 1.0;
    for (int m : {mx, my, mz}) {
      const int am = std::abs(m);
      if (am > nyq_old) return;
      if (am == nyq_old) {
        // Shrinking drops the old Nyquist; growing splits it between +N and -N.
        if (n_new <= go.n) return;
        factor *= 0.5;
      }
    }
    if (n_new < go.n) {
      const int nyq_new = n_new / 2;
      if (mx == nyq_new || std::abs(my) == nyq_new || std::abs(mz) == nyq_new) return;
    }
    const std::size_t src = go.spectral_index(mx, old_index(my), old_index(mz));
    for (int d = 0; d < 3; ++d) out.comp[d][idx] = factor * f.comp[d][src];
  });
  return out;
}

double mean_inner(const SpectralField& a, const SpectralField& b) {
  if (a.grid.n != b.grid.n) throw DomainError("inner product on mismatched grids");
  const GridSpec& g = a.grid;
  double sum = 0.0;
  for_each_mode(g, [&](std::size_t idx, int mx, int, int) {
    const double w = g.parseval_weight(mx);
    for (int d = 0; d < 3; ++d) sum += w * std::real(a.comp[d][idx] * std::conj(b.comp[d][idx]));
  });
  return sum;
}

double box_inner(const SpectralField& a, const SpectralField& b) {
  return a.grid.volume() * mean_inner(a, b);
}

double spectral_l2_norm(const SpectralField& f) {
  return std::sqrt(std::max(0.0, box_inner(f, f)));
}

double max_divergence(const SpectralField& f) {
  const GridSpec& g = f.grid;
  double m = 0.0;
  for_each_mode(g, [&](std::size_t idx, int mx, int my, int mz) {
    const Wavevector k = effective_k(g, mx, my, mz);
    const Complex div = k.kx * f.comp[0][idx] + k.ky * f.comp[1][idx] + k.kz * f.comp[2][idx];
    m = std::max(m, std::abs(div));
  });
  return m;
}

double spectral_tail_fraction(const SpectralField& velocity, double band_start) {
  const GridSpec& g = velocity.grid;
  const double threshold = band_start * g.dealias_cutoff();
  double total = 0.0, tail = 0.0;
  for_each_mode(g, [&](std::size_t idx, int mx, int my, int mz) {
    const Wavevector k = effective_k(g, mx, my, mz);
    double e = 0.0;
    for (int d = 0; d < 3; ++d) e += std::norm(velocity.comp[d][idx]);
    e *= g.parseval_weight(mx) * k.norm2();
    total += e;
    if (std::max({mx, std::abs(my), std::abs(mz)}) > threshold) tail += e;
  });
  return total > 0.0 ? tail / total : 0.0;
}

}  // namespace bulb
