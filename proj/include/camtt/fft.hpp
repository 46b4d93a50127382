#pragma once

#include "camtt/core.hpp"

#include <fftw3.h>

#include <complex>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>

namespace camtt {

using Complex = std::complex<double>;

namespace detail {
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// Unitary 1-D DFT of fixed length backed by FFTW. Forward uses e^{-j2pi kn/N}.
class UnitaryDft {
 public:
  enum class Direction { forward, inverse };

  UnitaryDft(std::size_t n, Direction dir) : n_(n), scale_(1.0 / std::sqrt(static_cast<double>(n))) {
    if (n == 0) throw SizeError("DFT length must be positive");
    in_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    out_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), in_, out_,
                             dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  UnitaryDft(const UnitaryDft&) = delete;
  UnitaryDft& operator=(const UnitaryDft&) = delete;
  ~UnitaryDft() {
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }

  [[nodiscard]] std::size_t size() const noexcept { return n_; }

  void transform(std::span<const Complex> in, std::span<Complex> out) {
    if (in.size() != n_ || out.size() != n_) throw SizeError("DFT buffer length mismatch");
    std::memcpy(in_, in.data(), sizeof(fftw_complex) * n_);
    fftw_execute(plan_);
    const auto* res = reinterpret_cast<const Complex*>(out_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = res[i] * scale_;
  }

 private:
  std::size_t n_;
  double scale_;
  fftw_complex* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

/// Per-thread plan cache.
inline UnitaryDft& cached_dft(std::size_t n, UnitaryDft::Direction dir) {
  thread_local std::map<std::pair<std::size_t, int>, std::unique_ptr<UnitaryDft>> cache;
  auto key = std::make_pair(n, static_cast<int>(dir));
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<UnitaryDft>(n, dir)).first;
  return *it->second;
}

/// Signed frequency index of FFT bin k for length n, in [-n/2, n/2).
inline long signed_frequency_index(std::size_t k, std::size_t n) {
  const auto kk = static_cast<long>(k);
  const auto nn = static_cast<long>(n);
  return kk < (nn + 1) / 2 ? kk : kk - nn;
}

}  // namespace camtt
