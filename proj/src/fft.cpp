#include "bulb/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <map>
#include <mutex>

#include "bulb/errors.hpp"

namespace bulb {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct FftEngine::Impl {
  std::size_t real_size = 0;
  std::size_t complex_size = 0;
  double* real_buf = nullptr;
  fftw_complex* complex_buf = nullptr;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  std::mutex exec_mutex;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
    if (real_buf) fftw_free(real_buf);
    if (complex_buf) fftw_free(complex_buf);
  }
};

FftEngine::FftEngine(int n) : n_(n), impl_(std::make_unique<Impl>()) {
  if (n < 2) throw DomainError("fft: invalid size");
  impl_->real_size = static_cast<std::size_t>(n) * n * n;
  impl_->complex_size = static_cast<std::size_t>(n) * n * (n / 2 + 1);
  std::lock_guard lock(planner_mutex());
  impl_->real_buf = fftw_alloc_real(impl_->real_size);
  impl_->complex_buf = fftw_alloc_complex(impl_->complex_size);
  impl_->r2c = fftw_plan_dft_r2c_3d(n, n, n, impl_->real_buf, impl_->complex_buf, FFTW_ESTIMATE);
  impl_->c2r = fftw_plan_dft_c2r_3d(n, n, n, impl_->complex_buf, impl_->real_buf, FFTW_ESTIMATE);
  if (!impl_->r2c || !impl_->c2r) throw Error("fft: FFTW planning failed");
}

FftEngine::~FftEngine() = default;

void FftEngine::forward(std::span<const double> in, std::span<Complex> out) {
  if (in.size() != impl_->real_size || out.size() != impl_->complex_size) {
    throw DomainError("fft: forward size mismatch");
  }
  std::lock_guard lock(impl_->exec_mutex);
  std::copy(in.begin(), in.end(), impl_->real_buf);
  fftw_execute(impl_->r2c);
  const double scale = 1.0 / static_cast<double>(impl_->real_size);
  const auto* src = reinterpret_cast<const Complex*>(impl_->complex_buf);
  for (std::size_t i = 0; i < impl_->complex_size; ++i) out[i] = src[i] * scale;
}

void FftEngine::inverse(std::span<const Complex> in, std::span<double> out) {
  if (in.size() != impl_->complex_size || out.size() != impl_->real_size) {
    throw DomainError("fft: inverse size mismatch");
  }
  std::lock_guard lock(impl_->exec_mutex);
  std::memcpy(impl_->complex_buf, in.data(), impl_->complex_size * sizeof(Complex));
  fftw_execute(impl_->c2r);
  std::copy(impl_->real_buf, impl_->real_buf + impl_->real_size, out.begin());
}

FftEngine& fft_engine(int n) {
  static std::mutex cache_mutex;
  // Intentionally leaked: engines outlive every static that might still hold one.
  static auto* cache = new std::map<int, std::unique_ptr<FftEngine>>();
  std::lock_guard lock(cache_mutex);
  auto& slot = (*cache)[n];
  if (!slot) slot = std::make_unique<FftEngine>(n);
  return *slot;
}

}  // namespace bulb
