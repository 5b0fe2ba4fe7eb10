#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace shearvol {

/// Voxel extents of a volume: depth (axial), fast-scan and slow-scan axes.
struct Dims3 {
  std::size_t nz = 0;
  std::size_t nx = 0;
  std::size_t ny = 0;

  std::size_t size() const { return nz * nx * ny; }
  bool operator==(const Dims3&) const = default;
  std::string to_string() const;
};

/// Physical voxel spacing in mm; 0 means unknown.
struct Pitch {
  double z = 0.0;
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Pitch&) const = default;
};

struct IntensityRange {
  double lo = 0.0;
  double hi = 255.0;
  bool operator==(const IntensityRange&) const = default;
};

/// Real scalar field on a regular 3D grid.
///
/// Samples are stored depth-fastest: index(z, x, y) = z + nz * (x + nx * y),
/// so every A-line is contiguous and every B-scan (fixed y) is a contiguous
/// block of nz * nx samples.
class VolumeGrid {
 public:
  VolumeGrid() = default;
  explicit VolumeGrid(Dims3 dims, double fill = 0.0);
  VolumeGrid(Dims3 dims, std::vector<double> values);

  const Dims3& dims() const { return dims_; }
  std::size_t size() const { return values_.size(); }

  std::size_t index(std::size_t z, std::size_t x, std::size_t y) const {
    return z + dims_.nz * (x + dims_.nx * y);
  }
  double& operator()(std::size_t z, std::size_t x, std::size_t y) {
    return values_[index(z, x, y)];
  }
  double operator()(std::size_t z, std::size_t x, std::size_t y) const {
    return values_[index(z, x, y)];
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& storage() { return values_; }

  /// The B-scan at slow-scan index y, as nz * nx contiguous samples.
  std::span<double> bscan(std::size_t y);
  std::span<const double> bscan(std::size_t y) const;

  const Pitch& pitch() const { return pitch_; }
  void set_pitch(Pitch p) { pitch_ = p; }
  const IntensityRange& range() const { return range_; }
  void set_range(IntensityRange r) { range_ = r; }

  /// Throws ValidationError if any sample is NaN or infinite.
  void require_finite() const;

 private:
  Dims3 dims_;
  std::vector<double> values_;
  Pitch pitch_;
  IntensityRange range_;
};

/// 2D real image, x fastest: index(x, y) = x + width * y.
class Image {
 public:
  Image() = default;
  Image(std::size_t width, std::size_t height, double fill = 0.0);
  Image(std::size_t width, std::size_t height, std::vector<double> values);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(std::size_t x, std::size_t y) { return values_[x + width_ * y]; }
  double operator()(std::size_t x, std::size_t y) const { return values_[x + width_ * y]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> values_;
};

}  // namespace shearvol
