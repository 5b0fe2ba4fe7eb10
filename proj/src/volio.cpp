#include "shearvol/volio.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "shearvol/errors.hpp"

namespace shearvol {

namespace {

void put_u32(std::uint8_t* p, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) p[b] = static_cast<std::uint8_t>(v >> (8 * b));
}

void put_u64(std::uint8_t* p, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) p[b] = static_cast<std::uint8_t>(v >> (8 * b));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(p[b]) << (8 * b);
  return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return v;
}

void put_f64(std::uint8_t* p, double v) { put_u64(p, std::bit_cast<std::uint64_t>(v)); }
double get_f64(const std::uint8_t* p) { return std::bit_cast<double>(get_u64(p)); }

std::uint32_t checked_u32(std::size_t n, const char* what) {
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw FormatError(std::string(what) + " too large for the container");
  }
  return static_cast<std::uint32_t>(n);
}

}  // namespace

std::vector<std::uint8_t> encode_volume(const VolumeGrid& volume, SampleType type) {
  VolumeHeader h;
  h.dims = volume.dims();
  h.type = type;
  std::vector<std::uint8_t> out(VolumeHeader::kSize + h.payload_size(), 0);
  std::memcpy(out.data(), VolumeHeader::kMagic, 6);
  out[6] = static_cast<std::uint8_t>(type);
  put_u32(&out[8], checked_u32(h.dims.nz, "nz"));
  put_u32(&out[12], checked_u32(h.dims.nx, "nx"));
  put_u32(&out[16], checked_u32(h.dims.ny, "ny"));
  put_f64(&out[24], volume.pitch().z);
  put_f64(&out[32], volume.pitch().x);
  put_f64(&out[40], volume.pitch().y);
  put_f64(&out[48], volume.range().lo);
  put_f64(&out[56], volume.range().hi);

  std::uint8_t* payload = out.data() + VolumeHeader::kSize;
  const auto values = volume.values();
  if (type == SampleType::kF32) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      put_u32(payload + 4 * i, std::bit_cast<std::uint32_t>(static_cast<float>(values[i])));
    }
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) {
      payload[i] = static_cast<std::uint8_t>(std::lround(std::clamp(values[i], 0.0, 255.0)));
    }
  }
  return out;
}

VolumeHeader decode_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 6 || std::memcmp(bytes.data(), VolumeHeader::kMagic, 6) != 0) {
    throw BadMagicError("not a SHVOL1 file (bad magic)");
  }
  if (bytes.size() < VolumeHeader::kSize) throw TruncatedError("header truncated");
  VolumeHeader h;
  if (bytes[6] > 1) throw FormatError("unknown sample type " + std::to_string(bytes[6]));
  h.type = static_cast<SampleType>(bytes[6]);
  h.dims = {get_u32(&bytes[8]), get_u32(&bytes[12]), get_u32(&bytes[16])};
  if (h.dims.size() == 0) throw FormatError("header declares an empty volume");
  h.pitch = {get_f64(&bytes[24]), get_f64(&bytes[32]), get_f64(&bytes[40])};
  h.range = {get_f64(&bytes[48]), get_f64(&bytes[56])};
  return h;
}

VolumeGrid decode_volume(std::span<const std::uint8_t> bytes) {
  const VolumeHeader h = decode_header(bytes);
  const std::size_t have = bytes.size() - VolumeHeader::kSize;
  if (have < h.payload_size()) {
    throw TruncatedError("payload truncated: " + std::to_string(have) + " of " +
                         std::to_string(h.payload_size()) + " bytes");
  }
  if (have > h.payload_size()) {
    throw FormatError("payload has " + std::to_string(have - h.payload_size()) +
                      " trailing bytes");
  }
  std::vector<double> values(h.dims.size());
  const std::uint8_t* payload = bytes.data() + VolumeHeader::kSize;
  if (h.type == SampleType::kF32) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = std::bit_cast<float>(get_u32(payload + 4 * i));
    }
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = payload[i];
  }
  VolumeGrid v(h.dims, std::move(values));
  v.set_pitch(h.pitch);
  v.set_range(h.range);
  return v;
}

VolumeGrid read_volume(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UnreadableError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_volume(bytes);
  } catch (const BadMagicError& e) {
    throw BadMagicError(path.string() + ": " + e.what());
  } catch (const TruncatedError& e) {
    throw TruncatedError(path.string() + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_volume(const std::filesystem::path& path, const VolumeGrid& volume, SampleType type) {
  const auto bytes = encode_volume(volume, type);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UnwritableError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw UnwritableError("write failed for " + path.string());
}

Image image_from_volume(const VolumeGrid& v) {
  if (v.dims().nz != 1) {
    throw ShapeError("expected a 2D image (nz == 1), got " + v.dims().to_string());
  }
  return Image(v.dims().nx, v.dims().ny, std::vector<double>(v.values().begin(), v.values().end()));
}

VolumeGrid volume_from_image(const Image& image, IntensityRange range) {
  VolumeGrid v({1, image.width(), image.height()},
               std::vector<double>(image.values().begin(), image.values().end()));
  v.set_range(range);
  return v;
}

Image read_image(const std::filesystem::path& path) { return image_from_volume(read_volume(path)); }

void write_image(const std::filesystem::path& path, const Image& image, IntensityRange range) {
  write_volume(path, volume_from_image(image, range));
}

void write_pgm(const std::filesystem::path& path, const Image& image, IntensityRange window) {
  if (!(window.hi > window.lo)) throw ParameterError("PGM window needs hi > lo");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UnwritableError("cannot write " + path.string());
  out << "P5\n" << image.width() << " " << image.height() << "\n255\n";
  std::vector<char> row(image.width());
  const double scale = 255.0 / (window.hi - window.lo);
  for (std::size_t y = 0; y < image.height(); ++y) {
    for (std::size_t x = 0; x < image.width(); ++x) {
      const double v = std::clamp((image(x, y) - window.lo) * scale, 0.0, 255.0);
      row[x] = static_cast<char>(static_cast<std::uint8_t>(std::lround(v)));
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw UnwritableError("write failed for " + path.string());
}

VolumeGrid normalize(const VolumeGrid& volume, IntensityRange target) {
  VolumeGrid out = volume;
  out.set_range(target);
  auto values = out.values();
  if (values.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) {
    std::fill(values.begin(), values.end(), 0.5 * (target.lo + target.hi));
    return out;
  }
  const double span = target.hi - target.lo;
  for (double& v : values) v = target.lo + (v - lo) / (hi - lo) * span;
  return out;
}

Image enface_project(const VolumeGrid& volume, const SlabSpec& slab) {
  const auto [nz, nx, ny] = volume.dims();
  Image out(nx, ny);

  // Per-column inclusive [first, last] depth range.
  auto column_range = [&](std::size_t x, std::size_t y) -> std::pair<std::size_t, std::size_t> {
    if (const auto* flat = std::get_if<FlatSlab>(&slab.bounds)) {
      return {flat->z0, flat->z1 - 1};
    }
    const auto& s = std::get<SurfaceSlab>(slab.bounds);
    const double top = std::round(s.top(x, y));
    const double bottom = std::round(s.bottom(x, y));
    return {static_cast<std::size_t>(top), static_cast<std::size_t>(bottom)};
  };

  if (const auto* flat = std::get_if<FlatSlab>(&slab.bounds)) {
    if (!(flat->z0 < flat->z1) || flat->z1 > nz) {
      throw BoundsError("slab [" + std::to_string(flat->z0) + ", " + std::to_string(flat->z1) +
                        ") is empty or outside depth 0.." + std::to_string(nz));
    }
  } else {
    const auto& s = std::get<SurfaceSlab>(slab.bounds);
    if (s.top.width() != nx || s.top.height() != ny || s.bottom.width() != nx ||
        s.bottom.height() != ny) {
      throw ShapeError("depth maps must be " + std::to_string(nx) + "x" + std::to_string(ny));
    }
    for (std::size_t i = 0; i < s.top.size(); ++i) {
      const double t = std::round(s.top.values()[i]);
      const double b = std::round(s.bottom.values()[i]);
      if (!std::isfinite(t) || !std::isfinite(b) || t < 0.0 || b > static_cast<double>(nz - 1)) {
        throw BoundsError("depth map value outside 0.." + std::to_string(nz - 1));
      }
      if (t > b) throw BoundsError("top surface below bottom surface at column " + std::to_string(i));
    }
  }

  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t x = 0; x < nx; ++x) {
      const auto [first, last] = column_range(x, y);
      double acc = slab.mode == ProjectionMode::kMax ? -std::numeric_limits<double>::infinity() : 0.0;
      for (std::size_t z = first; z <= last; ++z) {
        const double v = volume(z, x, y);
        acc = slab.mode == ProjectionMode::kMax ? std::max(acc, v) : acc + v;
      }
      if (slab.mode == ProjectionMode::kMean) acc /= static_cast<double>(last - first + 1);
      out(x, y) = acc;
    }
  }
  return out;
}

}  // namespace shearvol
