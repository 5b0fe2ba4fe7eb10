#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "shearvol/volume.hpp"

namespace shearvol {

// Synthetic OCT / OCTA scenes with known clean volumes.
//
// All randomness comes from rng::CounterRng (see rng.hpp). Noise draws are
// keyed by the generation seed; vessel layouts by a seed stored in the spec,
// so the clean volume depends on the spec alone.
//
// Noise counters, with i = z + nz * (x + nx * y) the voxel index:
//   speckle gain       stream 1, unit_mean_gamma(looks, i)
//   additive Gaussian  stream 2, normal(i)
//   OCTA frame y       stream 3: corrupted iff uniform(2y) < p, and its
//                      offset is lo + (hi - lo) * uniform(2y + 1)
//   OCTA row jitter    stream 4: row (y, z) of a corrupted frame carries
//                      offset * (1 + jitter * (2 * uniform(z + nz * y) - 1))

struct PhantomPair {
  VolumeGrid clean;
  VolumeGrid noisy;
};

/// Layered retina-like volume with multiplicative speckle.
struct OctPhantomSpec {
  Dims3 dims{64, 64, 64};
  /// Mean depth of each layer boundary as a fraction of nz, increasing.
  std::vector<double> boundaries{0.22, 0.36, 0.5, 0.62, 0.78};
  /// Intensity of each layer, top to bottom (boundaries.size() + 1 entries).
  std::vector<double> reflectivities{10.0, 150.0, 90.0, 120.0, 80.0, 200.0};
  /// Boundary undulation: z_b(x, y) = f_b * nz + a * sin(2 pi x / w + b) * cos(2 pi y / (1.5 w)).
  double waviness_amplitude = 3.0;
  double waviness_wavelength = 48.0;
  std::uint32_t looks = 4;
  double noise_std = 5.0;

  void validate() const;
};

struct Point3 {
  double z = 0.0;
  double x = 0.0;
  double y = 0.0;
};

/// A vessel: a tube of constant radius around a polyline.
struct VesselTube {
  std::vector<Point3> centerline;
  double radius = 1.0;
  double intensity = 200.0;
};

/// Random vessel network, expanded deterministically from `seed`.
struct VesselNetwork {
  std::size_t count = 0;
  std::uint64_t seed = 1;
  double radius_min = 1.5;
  double radius_max = 3.0;
  double intensity_min = 150.0;
  double intensity_max = 230.0;
};

/// Vascular volume with frame-correlated bulk-motion offsets.
struct OctaPhantomSpec {
  Dims3 dims{64, 128, 128};
  double background = 25.0;
  std::vector<VesselTube> tubes;
  VesselNetwork network{48};
  /// Depth interval [z0, z1) that holds generated vessels.
  std::size_t slab_z0 = 20;
  std::size_t slab_z1 = 44;
  /// In-plane diameter (voxels) of the vessel-free disc at the en-face center.
  double faz_diameter = 30.0;
  double frame_probability = 0.2;
  double offset_lo = 20.0;
  double offset_hi = 60.0;
  double row_jitter = 0.3;
  double noise_std = 35.0;

  void validate() const;
};

using PhantomSpec = std::variant<OctPhantomSpec, OctaPhantomSpec>;

PhantomPair gen_oct_phantom(const OctPhantomSpec& spec, std::uint64_t seed);
PhantomPair gen_octa_phantom(const OctaPhantomSpec& spec, std::uint64_t seed);
PhantomPair generate(const PhantomSpec& spec, std::uint64_t seed);

/// Explicit tubes followed by the expanded network.
std::vector<VesselTube> resolved_tubes(const OctaPhantomSpec& spec);
/// Slow-scan indices of the bulk-motion frames, increasing.
std::vector<std::size_t> corrupted_frames(const OctaPhantomSpec& spec, std::uint64_t seed);

// Text form: one "key = value" per line, '#' starts a comment.
//
//   kind = oct | octa
//   dims = nz nx ny
// oct:
//   boundaries = f1 f2 ...        reflectivities = r0 r1 ...
//   waviness_amplitude, waviness_wavelength, looks, noise_std
// octa:
//   background, slab = z0 z1, faz_diameter, frame_probability,
//   offset = lo hi, row_jitter, noise_std,
//   network_count, network_seed, network_radius = min max,
//   network_intensity = min max,
//   vessel = radius intensity z,x,y z,x,y ...   (repeatable)
//
// Keys left out keep their defaults. Throws ParameterError on unknown keys
// or malformed values and on specs that fail validation.
PhantomSpec parse_phantom_spec(std::string_view text);
std::string format_phantom_spec(const PhantomSpec& spec);
PhantomSpec read_phantom_spec(const std::filesystem::path& path);

}  // namespace shearvol
