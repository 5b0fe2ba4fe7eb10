#include "shearvol/volume.hpp"

#include <cmath>
#include <utility>

#include "shearvol/errors.hpp"

namespace shearvol {

std::string Dims3::to_string() const {
  return std::to_string(nz) + "x" + std::to_string(nx) + "x" + std::to_string(ny);
}

VolumeGrid::VolumeGrid(Dims3 dims, double fill) : dims_(dims), values_(dims.size(), fill) {}

VolumeGrid::VolumeGrid(Dims3 dims, std::vector<double> values)
    : dims_(dims), values_(std::move(values)) {
  if (values_.size() != dims_.size()) {
    throw ShapeError("volume of dims " + dims_.to_string() + " given " +
                     std::to_string(values_.size()) + " samples");
  }
}

std::span<double> VolumeGrid::bscan(std::size_t y) {
  if (y >= dims_.ny) throw BoundsError("B-scan index " + std::to_string(y) + " out of range");
  return std::span<double>(values_).subspan(y * dims_.nz * dims_.nx, dims_.nz * dims_.nx);
}

std::span<const double> VolumeGrid::bscan(std::size_t y) const {
  if (y >= dims_.ny) throw BoundsError("B-scan index " + std::to_string(y) + " out of range");
  return std::span<const double>(values_).subspan(y * dims_.nz * dims_.nx,
                                                  dims_.nz * dims_.nx);
}

void VolumeGrid::require_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) throw ValidationError("volume contains non-finite samples");
  }
}

Image::Image(std::size_t width, std::size_t height, double fill)
    : width_(width), height_(height), values_(width * height, fill) {}

Image::Image(std::size_t width, std::size_t height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (values_.size() != width_ * height_) {
    throw ShapeError("image of " + std::to_string(width_) + "x" + std::to_string(height_) +
                     " given " + std::to_string(values_.size()) + " samples");
  }
}

}  // namespace shearvol
