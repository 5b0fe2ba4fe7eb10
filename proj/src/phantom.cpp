#include "shearvol/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "shearvol/errors.hpp"
#include "shearvol/parallel.hpp"
#include "shearvol/rng.hpp"

namespace shearvol {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool ok, const std::string& message) {
  if (!ok) throw ParameterError(message);
}

void validate_dims(const Dims3& d) {
  require(d.nz > 0 && d.nx > 0 && d.ny > 0, "phantom dims must be positive, got " + d.to_string());
}

bool in_intensity_range(double v) { return std::isfinite(v) && v >= 0.0 && v <= 255.0; }

double clamp255(double v) { return std::clamp(v, 0.0, 255.0); }

// Fills `out` per slow-scan plane; the body sees (x, y) columns.
void for_each_column(const Dims3& d, const std::function<void(std::size_t, std::size_t)>& body) {
  parallel_for(d.ny, resolve_threads({}), [&](std::size_t y, int) {
    for (std::size_t x = 0; x < d.nx; ++x) body(x, y);
  });
}

double segment_distance(const Point3& p, const Point3& a, const Point3& b) {
  const double dz = b.z - a.z, dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dz * dz + dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = ((p.z - a.z) * dz + (p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
  }
  const double ez = a.z + t * dz - p.z, ex = a.x + t * dx - p.x, ey = a.y + t * dy - p.y;
  return std::sqrt(ez * ez + ex * ex + ey * ey);
}

std::pair<double, double> enface_center(const Dims3& d) {
  return {0.5 * (static_cast<double>(d.nx) - 1.0), 0.5 * (static_cast<double>(d.ny) - 1.0)};
}

std::vector<VesselTube> expand_network(const OctaPhantomSpec& spec) {
  const VesselNetwork& net = spec.network;
  std::vector<VesselTube> tubes;
  if (net.count == 0) return tubes;
  const rng::CounterRng r(net.seed, rng::kVesselLayout);
  const auto [cx, cy] = enface_center(spec.dims);
  const double faz_r = 0.5 * spec.faz_diameter;
  const double reach = 0.75 * static_cast<double>(std::max(spec.dims.nx, spec.dims.ny));

  tubes.reserve(net.count);
  for (std::size_t v = 0; v < net.count; ++v) {
    const std::uint64_t base = static_cast<std::uint64_t>(v) << 5;
    auto u = [&](int k) { return r.uniform(base + static_cast<std::uint64_t>(k)); };

    VesselTube tube;
    tube.radius = net.radius_min + (net.radius_max - net.radius_min) * u(0);
    tube.intensity = net.intensity_min + (net.intensity_max - net.intensity_min) * u(1);
    const double lo = static_cast<double>(spec.slab_z0) + tube.radius;
    const double hi = std::max(lo, static_cast<double>(spec.slab_z1) - 1.0 - tube.radius);
    const double zc = lo + (hi - lo) * u(2);
    const double theta = kTwoPi * u(3);

    constexpr int kPoints = 7;
    if (v % 4 == 3) {
      // Arc around the avascular zone.
      const double radius = faz_r + 3.0 + 0.3 * reach * u(4);
      const double span = 0.6 + 1.0 * u(5);
      for (int k = 0; k < kPoints; ++k) {
        const double a = theta + span * k / (kPoints - 1);
        const double z = std::clamp(zc + 2.0 * (u(8 + k) - 0.5), lo, hi);
        tube.centerline.push_back({z, cx + radius * std::cos(a), cy + radius * std::sin(a)});
      }
    } else {
      // Radial vessel from the zone edge outwards with a gentle curl.
      const double curl = 1.2 * (u(4) - 0.5);
      for (int k = 0; k < kPoints; ++k) {
        const double t = static_cast<double>(k) / (kPoints - 1);
        const double rad = faz_r + t * (reach - faz_r);
        const double a = theta + curl * t;
        const double z = std::clamp(zc + 2.0 * (u(8 + k) - 0.5), lo, hi);
        tube.centerline.push_back({z, cx + rad * std::cos(a), cy + rad * std::sin(a)});
      }
    }
    tubes.push_back(std::move(tube));
  }
  return tubes;
}

void rasterize(const VesselTube& tube, const OctaPhantomSpec& spec, VolumeGrid& out) {
  const Dims3& d = spec.dims;
  const auto [cx, cy] = enface_center(d);
  const double faz_r = 0.5 * spec.faz_diameter;
  const double reach = tube.radius + 1.0;

  auto lower = [](double v) { return static_cast<long>(std::floor(v)); };
  auto upper = [](double v) { return static_cast<long>(std::ceil(v)); };
  auto clip = [](long v, std::size_t n) {
    return static_cast<std::size_t>(std::clamp(v, 0L, static_cast<long>(n) - 1));
  };

  for (std::size_t s = 0; s + 1 < tube.centerline.size(); ++s) {
    const Point3& a = tube.centerline[s];
    const Point3& b = tube.centerline[s + 1];
    const long z0 = lower(std::min(a.z, b.z) - reach), z1 = upper(std::max(a.z, b.z) + reach);
    const long x0 = lower(std::min(a.x, b.x) - reach), x1 = upper(std::max(a.x, b.x) + reach);
    const long y0 = lower(std::min(a.y, b.y) - reach), y1 = upper(std::max(a.y, b.y) + reach);
    if (z1 < 0 || x1 < 0 || y1 < 0 || z0 >= static_cast<long>(d.nz) ||
        x0 >= static_cast<long>(d.nx) || y0 >= static_cast<long>(d.ny)) {
      continue;
    }
    for (std::size_t y = clip(y0, d.ny); y <= clip(y1, d.ny); ++y) {
      for (std::size_t x = clip(x0, d.nx); x <= clip(x1, d.nx); ++x) {
        if (std::hypot(static_cast<double>(x) - cx, static_cast<double>(y) - cy) < faz_r) continue;
        for (std::size_t z = clip(z0, d.nz); z <= clip(z1, d.nz); ++z) {
          const Point3 p{static_cast<double>(z), static_cast<double>(x), static_cast<double>(y)};
          const double cover = std::clamp(tube.radius + 0.5 - segment_distance(p, a, b), 0.0, 1.0);
          if (cover <= 0.0) continue;
          const double v = spec.background + cover * (tube.intensity - spec.background);
          double& cell = out(z, x, y);
          cell = std::max(cell, v);
        }
      }
    }
  }
}

// ---- text configuration ---------------------------------------------------

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<double> numbers(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    require(used == tok.size(), "bad number '" + tok + "' for key '" + key + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<double> numbers(const std::string& key, const std::string& value, std::size_t n) {
  auto out = numbers(key, value);
  require(out.size() == n, "key '" + key + "' expects " + std::to_string(n) + " value(s)");
  return out;
}

std::size_t count_value(const std::string& key, const std::string& value) {
  const double v = numbers(key, value, 1)[0];
  require(v >= 0.0 && v == std::floor(v), "key '" + key + "' expects a non-negative integer");
  return static_cast<std::size_t>(v);
}

Dims3 dims_value(const std::string& key, const std::string& value) {
  const auto v = numbers(key, value, 3);
  for (double c : v) require(c >= 1.0 && c == std::floor(c), "dims must be positive integers");
  return {static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1]),
          static_cast<std::size_t>(v[2])};
}

VesselTube tube_value(const std::string& value) {
  std::istringstream in(value);
  VesselTube tube;
  std::string radius, intensity;
  require(static_cast<bool>(in >> radius >> intensity), "vessel needs radius and intensity");
  tube.radius = numbers("vessel", radius, 1)[0];
  tube.intensity = numbers("vessel", intensity, 1)[0];
  std::string point;
  while (in >> point) {
    std::replace(point.begin(), point.end(), ',', ' ');
    const auto c = numbers("vessel", point, 3);
    tube.centerline.push_back({c[0], c[1], c[2]});
  }
  return tube;
}

std::string join(const std::vector<double>& v) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
  return out.str();
}

std::string num(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

void OctPhantomSpec::validate() const {
  validate_dims(dims);
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    require(boundaries[i] > 0.0 && boundaries[i] < 1.0, "layer boundaries must lie in (0, 1)");
    require(i == 0 || boundaries[i] > boundaries[i - 1], "layer boundaries must increase");
  }
  require(reflectivities.size() == boundaries.size() + 1,
          "need one reflectivity more than boundaries");
  for (double r : reflectivities) require(in_intensity_range(r), "reflectivities must lie in [0, 255]");
  require(std::isfinite(waviness_amplitude) && waviness_amplitude >= 0.0,
          "waviness amplitude must be >= 0");
  require(waviness_wavelength > 0.0, "waviness wavelength must be > 0");
  require(looks >= 1, "speckle looks must be >= 1");
  require(std::isfinite(noise_std) && noise_std >= 0.0, "noise std must be >= 0");
}

void OctaPhantomSpec::validate() const {
  validate_dims(dims);
  require(in_intensity_range(background), "background must lie in [0, 255]");
  require(slab_z0 < slab_z1 && slab_z1 <= dims.nz, "vessel slab must satisfy z0 < z1 <= nz");
  require(faz_diameter >= 0.0 &&
              faz_diameter <= static_cast<double>(std::min(dims.nx, dims.ny)),
          "FAZ disc must fit in the en-face plane");
  require(frame_probability >= 0.0 && frame_probability <= 1.0, "frame probability must be in [0, 1]");
  require(std::isfinite(offset_lo) && std::isfinite(offset_hi) && offset_lo <= offset_hi,
          "offset range needs lo <= hi");
  require(row_jitter >= 0.0 && row_jitter <= 1.0, "row jitter must be in [0, 1]");
  require(std::isfinite(noise_std) && noise_std >= 0.0, "noise std must be >= 0");
  for (const auto& t : tubes) {
    require(t.radius >= 1.0, "vessel radius must be >= 1 voxel");
    require(in_intensity_range(t.intensity), "vessel intensity must lie in [0, 255]");
    require(!t.centerline.empty(), "vessel needs at least one centerline point");
  }
  if (network.count > 0) {
    require(network.radius_min >= 1.0 && network.radius_min <= network.radius_max,
            "network radius range needs 1 <= min <= max");
    require(in_intensity_range(network.intensity_min) && in_intensity_range(network.intensity_max) &&
                network.intensity_min <= network.intensity_max,
            "network intensity range must lie in [0, 255]");
  }
}

PhantomPair gen_oct_phantom(const OctPhantomSpec& spec, std::uint64_t seed) {
  spec.validate();
  const Dims3& d = spec.dims;
  PhantomPair out{VolumeGrid(d), VolumeGrid(d)};

  const double nz = static_cast<double>(d.nz);
  const double w = spec.waviness_wavelength;
  for_each_column(d, [&](std::size_t x, std::size_t y) {
    std::vector<double> depth(spec.boundaries.size());
    for (std::size_t b = 0; b < depth.size(); ++b) {
      const double phase = 1.3 * static_cast<double>(b);
      depth[b] = spec.boundaries[b] * nz +
                 spec.waviness_amplitude * std::sin(kTwoPi * static_cast<double>(x) / w + phase) *
                     std::cos(kTwoPi * static_cast<double>(y) / (1.5 * w));
    }
    std::size_t layer = 0;
    for (std::size_t z = 0; z < d.nz; ++z) {
      const double zc = static_cast<double>(z) + 0.5;
      // Wavy boundaries may cross; the layer index only ever moves down.
      while (layer < depth.size() && zc > depth[layer]) ++layer;
      out.clean(z, x, y) = spec.reflectivities[layer];
    }
  });

  const rng::CounterRng speckle(seed, rng::kSpeckle);
  const rng::CounterRng additive(seed, rng::kAdditive);
  const double looks = static_cast<double>(spec.looks);
  for_each_column(d, [&](std::size_t x, std::size_t y) {
    for (std::size_t z = 0; z < d.nz; ++z) {
      const std::size_t i = out.clean.index(z, x, y);
      double v = out.clean.values()[i] * speckle.unit_mean_gamma(looks, i);
      if (spec.noise_std > 0.0) v += spec.noise_std * additive.normal(i);
      out.noisy.values()[i] = clamp255(v);
    }
  });
  return out;
}

std::vector<VesselTube> resolved_tubes(const OctaPhantomSpec& spec) {
  std::vector<VesselTube> all = spec.tubes;
  auto generated = expand_network(spec);
  all.insert(all.end(), std::make_move_iterator(generated.begin()),
             std::make_move_iterator(generated.end()));
  return all;
}

std::vector<std::size_t> corrupted_frames(const OctaPhantomSpec& spec, std::uint64_t seed) {
  const rng::CounterRng frames(seed, rng::kFrames);
  std::vector<std::size_t> out;
  for (std::size_t y = 0; y < spec.dims.ny; ++y) {
    if (frames.uniform(2 * y) < spec.frame_probability) out.push_back(y);
  }
  return out;
}

PhantomPair gen_octa_phantom(const OctaPhantomSpec& spec, std::uint64_t seed) {
  spec.validate();
  const Dims3& d = spec.dims;
  PhantomPair out{VolumeGrid(d, spec.background), VolumeGrid(d)};
  for (const auto& tube : resolved_tubes(spec)) rasterize(tube, spec, out.clean);

  const Pitch pitch{0.0, 3.0 / static_cast<double>(d.nx), 3.0 / static_cast<double>(d.ny)};
  out.clean.set_pitch(pitch);
  out.noisy.set_pitch(pitch);

  std::vector<double> frame_offset(d.ny, 0.0);
  {
    const rng::CounterRng frames(seed, rng::kFrames);
    for (std::size_t y : corrupted_frames(spec, seed)) {
      frame_offset[y] = spec.offset_lo + (spec.offset_hi - spec.offset_lo) * frames.uniform(2 * y + 1);
    }
  }
  const rng::CounterRng jitter(seed, rng::kRowJitter);
  const rng::CounterRng additive(seed, rng::kAdditive);
  for_each_column(d, [&](std::size_t x, std::size_t y) {
    for (std::size_t z = 0; z < d.nz; ++z) {
      const std::size_t i = out.clean.index(z, x, y);
      double v = out.clean.values()[i];
      if (frame_offset[y] != 0.0) {
        const double j = 2.0 * jitter.uniform(z + d.nz * y) - 1.0;
        v += frame_offset[y] * (1.0 + spec.row_jitter * j);
      }
      if (spec.noise_std > 0.0) v += spec.noise_std * additive.normal(i);
      out.noisy.values()[i] = clamp255(v);
    }
  });
  return out;
}

PhantomPair generate(const PhantomSpec& spec, std::uint64_t seed) {
  return std::visit(
      [&](const auto& s) -> PhantomPair {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, OctPhantomSpec>) {
          return gen_oct_phantom(s, seed);
        } else {
          return gen_octa_phantom(s, seed);
        }
      },
      spec);
}

PhantomSpec parse_phantom_spec(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::string kind;
  std::istringstream in{std::string(text)};
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, "line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    require(!key.empty(), "line " + std::to_string(lineno) + ": empty key");
    if (key == "kind") {
      kind = value;
    } else {
      entries.emplace_back(std::move(key), std::move(value));
    }
  }
  require(kind == "oct" || kind == "octa", "phantom spec needs kind = oct or kind = octa");

  if (kind == "oct") {
    OctPhantomSpec s;
    for (const auto& [k, v] : entries) {
      if (k == "dims") s.dims = dims_value(k, v);
      else if (k == "boundaries") s.boundaries = numbers(k, v);
      else if (k == "reflectivities") s.reflectivities = numbers(k, v);
      else if (k == "waviness_amplitude") s.waviness_amplitude = numbers(k, v, 1)[0];
      else if (k == "waviness_wavelength") s.waviness_wavelength = numbers(k, v, 1)[0];
      else if (k == "looks") s.looks = static_cast<std::uint32_t>(count_value(k, v));
      else if (k == "noise_std") s.noise_std = numbers(k, v, 1)[0];
      else throw ParameterError("unknown oct phantom key '" + k + "'");
    }
    s.validate();
    return s;
  }

  OctaPhantomSpec s;
  for (const auto& [k, v] : entries) {
    if (k == "dims") {
      s.dims = dims_value(k, v);
    } else if (k == "background") {
      s.background = numbers(k, v, 1)[0];
    } else if (k == "slab") {
      const auto z = numbers(k, v, 2);
      require(z[0] >= 0.0 && z[1] >= 0.0, "slab bounds must be non-negative");
      s.slab_z0 = static_cast<std::size_t>(z[0]);
      s.slab_z1 = static_cast<std::size_t>(z[1]);
    } else if (k == "faz_diameter") {
      s.faz_diameter = numbers(k, v, 1)[0];
    } else if (k == "frame_probability") {
      s.frame_probability = numbers(k, v, 1)[0];
    } else if (k == "offset") {
      const auto o = numbers(k, v, 2);
      s.offset_lo = o[0];
      s.offset_hi = o[1];
    } else if (k == "row_jitter") {
      s.row_jitter = numbers(k, v, 1)[0];
    } else if (k == "noise_std") {
      s.noise_std = numbers(k, v, 1)[0];
    } else if (k == "network_count") {
      s.network.count = count_value(k, v);
    } else if (k == "network_seed") {
      std::size_t used = 0;
      try {
        s.network.seed = std::stoull(v, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      require(!v.empty() && used == v.size() && v[0] != '-', "network_seed expects an unsigned integer");
    } else if (k == "network_radius") {
      const auto r = numbers(k, v, 2);
      s.network.radius_min = r[0];
      s.network.radius_max = r[1];
    } else if (k == "network_intensity") {
      const auto r = numbers(k, v, 2);
      s.network.intensity_min = r[0];
      s.network.intensity_max = r[1];
    } else if (k == "vessel") {
      s.tubes.push_back(tube_value(v));
    } else {
      throw ParameterError("unknown octa phantom key '" + k + "'");
    }
  }
  s.validate();
  return s;
}

std::string format_phantom_spec(const PhantomSpec& spec) {
  std::ostringstream out;
  auto dims = [](const Dims3& d) {
    return std::to_string(d.nz) + " " + std::to_string(d.nx) + " " + std::to_string(d.ny);
  };
  if (const auto* s = std::get_if<OctPhantomSpec>(&spec)) {
    out << "kind = oct\n"
        << "dims = " << dims(s->dims) << "\n"
        << "boundaries = " << join(s->boundaries) << "\n"
        << "reflectivities = " << join(s->reflectivities) << "\n"
        << "waviness_amplitude = " << num(s->waviness_amplitude) << "\n"
        << "waviness_wavelength = " << num(s->waviness_wavelength) << "\n"
        << "looks = " << s->looks << "\n"
        << "noise_std = " << num(s->noise_std) << "\n";
    return out.str();
  }
  const auto& s = std::get<OctaPhantomSpec>(spec);
  out << "kind = octa\n"
      << "dims = " << dims(s.dims) << "\n"
      << "background = " << num(s.background) << "\n"
      << "slab = " << s.slab_z0 << " " << s.slab_z1 << "\n"
      << "faz_diameter = " << num(s.faz_diameter) << "\n"
      << "frame_probability = " << num(s.frame_probability) << "\n"
      << "offset = " << num(s.offset_lo) << " " << num(s.offset_hi) << "\n"
      << "row_jitter = " << num(s.row_jitter) << "\n"
      << "noise_std = " << num(s.noise_std) << "\n"
      << "network_count = " << s.network.count << "\n"
      << "network_seed = " << s.network.seed << "\n"
      << "network_radius = " << num(s.network.radius_min) << " " << num(s.network.radius_max) << "\n"
      << "network_intensity = " << num(s.network.intensity_min) << " "
      << num(s.network.intensity_max) << "\n";
  for (const auto& t : s.tubes) {
    out << "vessel = " << num(t.radius) << " " << num(t.intensity);
    for (const auto& p : t.centerline) out << " " << num(p.z) << "," << num(p.x) << "," << num(p.y);
    out << "\n";
  }
  return out.str();
}

PhantomSpec read_phantom_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UnreadableError("cannot open phantom spec " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_phantom_spec(text.str());
}

}  // namespace shearvol
