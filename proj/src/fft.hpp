#pragma once

// Thin RAII layer over FFTW's real-to-complex transforms. Internal to the
// library; nothing here is part of the installed interface.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "shearvol/spectrum.hpp"

namespace shearvol::detail {

using Complex = std::complex<double>;

void* fft_alloc(std::size_t bytes);
void fft_free(void* p) noexcept;

// Allocator giving FFTW's preferred SIMD alignment; plans are created against
// such buffers and later executed on other buffers of the same kind.
template <typename T>
struct FftAllocator {
  using value_type = T;
  FftAllocator() = default;
  template <typename U>
  FftAllocator(const FftAllocator<U>&) {}
  T* allocate(std::size_t n) { return static_cast<T*>(fft_alloc(n * sizeof(T))); }
  void deallocate(T* p, std::size_t) noexcept { fft_free(p); }
  template <typename U>
  bool operator==(const FftAllocator<U>&) const { return true; }
};

using RealBuffer = std::vector<double, FftAllocator<double>>;
using SpectrumBuffer = std::vector<Complex, FftAllocator<Complex>>;

class RealFft {
 public:
  explicit RealFft(std::span<const std::size_t> dims);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  const SpectrumLayout& layout() const { return layout_; }

  // Unnormalized forward transform; `in` is preserved.
  void forward(const RealBuffer& in, SpectrumBuffer& out) const;
  // Inverse transform scaled by 1/N; `in` is overwritten.
  void inverse(SpectrumBuffer& in, RealBuffer& out) const;

  RealBuffer make_real() const { return RealBuffer(layout_.real_size(), 0.0); }
  SpectrumBuffer make_spectrum() const { return SpectrumBuffer(layout_.spectrum_size()); }

 private:
  struct Plans;
  SpectrumLayout layout_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace shearvol::detail
