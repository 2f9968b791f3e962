#pragma once

#include <memory>
#include <span>

#include "bulb/grid.hpp"

namespace bulb {

/// Real-to-complex 3D transform pair of fixed size n^3 backed by FFTW.
///
/// Plans use FFTW_ESTIMATE so that the chosen algorithm, and therefore the
/// round-off pattern, is identical across runs. forward() returns normalised
/// Fourier coefficients (divided by n^3); inverse() is the exact inverse.
class FftEngine {
 public:
  explicit FftEngine(int n);
  ~FftEngine();
  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;

  int size() const { return n_; }
  void forward(std::span<const double> in, std::span<Complex> out);
  void inverse(std::span<const Complex> in, std::span<double> out);

 private:
  struct Impl;
  int n_;
  std::unique_ptr<Impl> impl_;
};

/// Shared engine for lattice size n (created on first use, never destroyed).
FftEngine& fft_engine(int n);

}  // namespace bulb
