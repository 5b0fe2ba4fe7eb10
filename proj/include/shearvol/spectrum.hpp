#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace shearvol {

/// Half-spectrum layout of a real grid in volume axis order (axis 0 is the
/// contiguous one, and the one FFTW halves). A spectrum sample (k0, k1, k2)
/// with k0 <= n0 / 2 lives at h = k0 + half0 * (k1 + n1 * k2); the other
/// half follows from Hermitian symmetry.
struct SpectrumLayout {
  std::vector<std::size_t> dims;
  std::size_t half0 = 0;

  SpectrumLayout() = default;
  explicit SpectrumLayout(std::span<const std::size_t> d);
  std::size_t real_size() const;
  std::size_t spectrum_size() const;
  std::size_t rank() const { return dims.size(); }
};

}  // namespace shearvol
