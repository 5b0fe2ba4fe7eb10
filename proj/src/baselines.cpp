#include "shearvol/baselines.hpp"

#include <algorithm>
#include <vector>

#include "shearvol/errors.hpp"

namespace shearvol {

namespace {

double median_of(std::vector<double>& row) {
  const std::size_t n = row.size();
  const auto mid = row.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(row.begin(), mid, row.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(row.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace

VolumeGrid median_subtract(const VolumeGrid& volume) {
  volume.require_finite();
  const auto [nz, nx, ny] = volume.dims();
  VolumeGrid out(volume.dims());
  out.set_pitch(volume.pitch());
  out.set_range(volume.range());
  std::vector<double> row(nx);
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t z = 0; z < nz; ++z) {
      for (std::size_t x = 0; x < nx; ++x) row[x] = volume(z, x, y);
      const double med = median_of(row);
      for (std::size_t x = 0; x < nx; ++x) out(z, x, y) = std::max(0.0, volume(z, x, y) - med);
    }
  }
  return out;
}

VolumeGrid pixel_average_axial(const VolumeGrid& volume, int window) {
  if (window < 1) throw ParameterError("averaging window must be >= 1, got " + std::to_string(window));
  volume.require_finite();
  const auto [nz, nx, ny] = volume.dims();
  VolumeGrid out(volume.dims());
  out.set_pitch(volume.pitch());
  out.set_range(volume.range());

  const auto w = static_cast<std::ptrdiff_t>(window);
  const std::ptrdiff_t before = (w - 1) / 2;
  const std::ptrdiff_t after = w / 2;
  const auto snz = static_cast<std::ptrdiff_t>(nz);
  for (std::size_t col = 0; col < nx * ny; ++col) {
    const double* a = volume.values().data() + col * nz;
    double* o = out.values().data() + col * nz;
    for (std::ptrdiff_t z = 0; z < snz; ++z) {
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, z - before);
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(snz - 1, z + after);
      double sum = 0.0;
      for (std::ptrdiff_t t = lo; t <= hi; ++t) sum += a[t];
      o[z] = sum / static_cast<double>(hi - lo + 1);
    }
  }
  return out;
}

}  // namespace shearvol
