#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include "shearvol/volume.hpp"

namespace shearvol {

// SHVOL1 container, all fields little-endian:
//
//   offset  size  field
//        0     6  magic "SHVOL1"
//        6     1  sample type: 0 = f32, 1 = u8
//        7     1  reserved, 0
//        8     4  nz (u32)
//       12     4  nx (u32)
//       16     4  ny (u32)
//       20     4  reserved, 0
//       24    24  pitch z, x, y in mm (f64; 0 = unknown)
//       48    16  intensity range lo, hi (f64)
//       64     -  nz * nx * ny samples, depth fastest (z + nz * (x + nx * y))
//
// 2D images (en-face maps, depth surfaces) use nz = 1, nx = width, ny = height.

enum class SampleType : std::uint8_t { kF32 = 0, kU8 = 1 };

struct VolumeHeader {
  static constexpr std::size_t kSize = 64;
  static constexpr char kMagic[7] = "SHVOL1";

  Dims3 dims;
  SampleType type = SampleType::kF32;
  Pitch pitch;
  IntensityRange range;

  std::size_t sample_size() const { return type == SampleType::kF32 ? 4 : 1; }
  std::size_t payload_size() const { return dims.size() * sample_size(); }
};

/// Serialized bytes of a volume. u8 samples are rounded and clamped to [0, 255].
std::vector<std::uint8_t> encode_volume(const VolumeGrid& volume,
                                        SampleType type = SampleType::kF32);
/// Throws BadMagicError, TruncatedError or FormatError.
VolumeGrid decode_volume(std::span<const std::uint8_t> bytes);
VolumeHeader decode_header(std::span<const std::uint8_t> bytes);

/// File variants. read_volume throws UnreadableError if the file cannot be
/// opened, write_volume UnwritableError if it cannot be created.
VolumeGrid read_volume(const std::filesystem::path& path);
void write_volume(const std::filesystem::path& path, const VolumeGrid& volume,
                  SampleType type = SampleType::kF32);

/// 2D images in the same container (nz must be 1 on read).
Image read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const Image& image,
                 IntensityRange range = {});
Image image_from_volume(const VolumeGrid& v);
VolumeGrid volume_from_image(const Image& image, IntensityRange range = {});

/// 8-bit binary PGM (P5). Values are mapped linearly from `window` onto
/// 0..255, clamped and rounded. Row r of the file is image row y = r.
void write_pgm(const std::filesystem::path& path, const Image& image,
               IntensityRange window = {});

/// Affine map of [min, max] of the data onto `target`; a constant volume
/// maps to the midpoint of `target`. The result declares `target` as range.
VolumeGrid normalize(const VolumeGrid& volume, IntensityRange target = {0.0, 255.0});

enum class ProjectionMode { kMax, kMean };

/// Depth interval per (x, y) column: either flat [z0, z1) or the inclusive
/// range between two depth surfaces (rounded to the nearest voxel).
struct FlatSlab {
  std::size_t z0 = 0;
  std::size_t z1 = 0;
};
struct SurfaceSlab {
  Image top;
  Image bottom;
};
struct SlabSpec {
  ProjectionMode mode = ProjectionMode::kMax;
  std::variant<FlatSlab, SurfaceSlab> bounds;
};

/// En-face image of size (nx, ny). Throws BoundsError for slabs that are
/// empty, inverted or outside the volume at any column.
Image enface_project(const VolumeGrid& volume, const SlabSpec& slab);

}  // namespace shearvol
