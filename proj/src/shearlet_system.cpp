#include "shearvol/shearlet_system.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>

#include "shearvol/errors.hpp"
#include "shearvol/parallel.hpp"

namespace shearvol {

namespace window {

double meyer_poly(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double x2 = x * x;
  return x2 * x2 * (35.0 - 84.0 * x + 70.0 * x2 - 20.0 * x2 * x);
}

double lowpass(double w, double cutoff) {
  const double aw = std::abs(w);
  if (aw <= 0.5 * cutoff) return 1.0;
  if (aw >= cutoff) return 0.0;
  return std::cos(0.5 * std::numbers::pi * meyer_poly(2.0 * aw / cutoff - 1.0));
}

double radial(double w, int j, int num_scales, double cutoff) {
  const double aw = std::abs(w);
  const double inner = lowpass(aw / std::ldexp(1.0, j), cutoff);
  const double outer = j + 1 < num_scales ? lowpass(aw / std::ldexp(1.0, j + 1), cutoff) : 1.0;
  return std::sqrt(std::max(0.0, outer * outer - inner * inner));
}

double bump(double x) {
  const double ax = std::abs(x);
  if (ax >= 1.0) return 0.0;
  return std::cos(0.5 * std::numbers::pi * meyer_poly(ax));
}

}  // namespace window

namespace {

// Soft indicator of "axis p dominates axis a": 1 once |w_p| >= |w_a|, fading
// to 0 over one grid cell past the diagonal.
double cone_ramp(double s) {
  if (s >= 0.0) return 1.0;
  if (s <= -1.0) return 0.0;
  return window::meyer_poly(1.0 + s);
}

double grid_frequency(std::size_t k, std::size_t n) {
  // DFT order, Nyquist (k == n/2) maps to -1.
  const auto ki = static_cast<double>(k);
  const auto ni = static_cast<double>(n);
  return k < n / 2 ? 2.0 * ki / ni : 2.0 * (ki - ni) / ni;
}

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) {
    h ^= (v >> (8 * b)) & 0xffu;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t config_fingerprint(const ShearletConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  h = fnv1a(h, static_cast<std::uint64_t>(c.num_scales));
  for (int l : c.shear_levels) h = fnv1a(h, static_cast<std::uint64_t>(l));
  for (std::size_t d : c.dims) h = fnv1a(h, d);
  h = fnv1a(h, std::bit_cast<std::uint64_t>(c.lowpass_cutoff));
  h = fnv1a(h, c.threshold_lowpass ? 1u : 0u);
  return h;
}

// Appends half-spectrum samples in increasing index order.
void push_sample(SparseFilter& f, std::size_t h, double v) {
  if (!f.runs.empty()) {
    auto& last = f.runs.back();
    if (last.begin + last.length == h) {
      ++last.length;
      f.values.push_back(v);
      return;
    }
  }
  f.runs.push_back({h, 1, f.values.size()});
  f.values.push_back(v);
}

struct Contribution {
  std::size_t id;
  double value;
};

// Small fixed-capacity accumulator: at most 2 shears per sheared axis are
// active at any frequency, so 4 entries per evaluation, 8 with mirroring.
struct ContributionSet {
  std::array<Contribution, 8> items{};
  std::size_t count = 0;

  void add(std::size_t id, double v) {
    for (std::size_t t = 0; t < count; ++t) {
      if (items[t].id == id) {
        items[t].value += v;
        return;
      }
    }
    items[count++] = {id, v};
  }
};

// Builds all directional filters of one (scale, pyramid) block.
class BlockBuilder {
 public:
  BlockBuilder(const ShearletConfig& config, int scale, int pyramid)
      : config_(config), scale_(scale), pyramid_(pyramid) {
    rank_ = config.dims.size();
    for (std::size_t a = 0; a < rank_; ++a) {
      if (static_cast<int>(a) != pyramid) sub_axes_.push_back(a);
    }
    shears_ = 1 << config.shear_levels[scale];
    span_ = 2 * shears_ + 1;
    for (std::size_t a : sub_axes_) {
      const double cell = 2.0 / static_cast<double>(std::min(config.dims[a],
                                                             config.dims[pyramid]));
      ramp_width_.push_back(cell);
    }
  }

  std::size_t filters_in_block() const {
    return sub_axes_.size() == 1 ? span_ : span_ * span_;
  }

  std::vector<SparseFilter> build(const SpectrumLayout& layout) const {
    std::vector<SparseFilter> out(filters_in_block());
    const auto& d = config_.dims;
    const std::size_t n1 = rank_ > 1 ? d[1] : 1;
    const std::size_t n2 = rank_ > 2 ? d[2] : 1;

    std::array<std::size_t, 3> k{};
    std::array<double, 3> w{};
    std::array<double, 3> wm{};
    std::size_t h = 0;
    for (k[2] = 0; k[2] < n2; ++k[2]) {
      for (k[1] = 0; k[1] < n1; ++k[1]) {
        for (k[0] = 0; k[0] < layout.half0; ++k[0], ++h) {
          bool self_mirrored_nyquist = false;
          for (std::size_t a = 0; a < rank_; ++a) {
            w[a] = grid_frequency(k[a], d[a]);
            const std::size_t km = (d[a] - k[a]) % d[a];
            wm[a] = grid_frequency(km, d[a]);
            if (k[a] == d[a] / 2) self_mirrored_nyquist = true;
          }
          ContributionSet set;
          if (self_mirrored_nyquist) {
            // The mirror of a Nyquist-plane sample is another sample of the
            // same plane; averaging enforces psi(k) == psi(-k) exactly.
            evaluate(w, 0.5, set);
            evaluate(wm, 0.5, set);
          } else {
            evaluate(w, 1.0, set);
          }
          for (std::size_t t = 0; t < set.count; ++t) {
            if (set.items[t].value > 0.0) push_sample(out[set.items[t].id], h, set.items[t].value);
          }
        }
      }
    }
    return out;
  }

 private:
  void evaluate(const std::array<double, 3>& w, double weight, ContributionSet& set) const {
    const double dom = w[pyramid_];
    const double adom = std::abs(dom);
    if (adom == 0.0) return;
    const double radial = window::radial(adom, scale_, config_.num_scales, config_.lowpass_cutoff);
    if (radial == 0.0) return;

    // Per sheared axis: the two shears whose bump can be active and the 2D
    // wedge factor radial * cone * bump for each.
    std::array<std::array<int, 2>, 2> ks{};
    std::array<std::array<double, 2>, 2> fac{};
    std::array<int, 2> nk{};
    const double scale = static_cast<double>(shears_);
    for (std::size_t s = 0; s < sub_axes_.size(); ++s) {
      const std::size_t a = sub_axes_[s];
      const double cone = cone_ramp((adom - std::abs(w[a])) / ramp_width_[s]);
      if (cone == 0.0) return;
      const double x = scale * w[a] / dom;
      const double base = std::floor(x);
      nk[s] = 0;
      for (int off = 0; off < 2; ++off) {
        const double kd = base + off;
        if (kd < -scale || kd > scale) continue;
        const double b = window::bump(x - kd);
        if (b == 0.0) continue;
        ks[s][nk[s]] = static_cast<int>(kd);
        fac[s][nk[s]] = radial * cone * b;
        ++nk[s];
      }
      if (nk[s] == 0) return;
    }

    if (sub_axes_.size() == 1) {
      for (int t = 0; t < nk[0]; ++t) {
        set.add(static_cast<std::size_t>(ks[0][t] + shears_), weight * fac[0][t]);
      }
      return;
    }
    // 3D: product of the two 2D wedges sharing the dominant axis.
    for (int t1 = 0; t1 < nk[0]; ++t1) {
      for (int t2 = 0; t2 < nk[1]; ++t2) {
        const auto id = static_cast<std::size_t>((ks[0][t1] + shears_) * span_ +
                                                 (ks[1][t2] + shears_));
        set.add(id, weight * fac[0][t1] * fac[1][t2]);
      }
    }
  }

  const ShearletConfig& config_;
  int scale_;
  int pyramid_;
  std::size_t rank_ = 0;
  std::vector<std::size_t> sub_axes_;
  std::vector<double> ramp_width_;
  int shears_ = 1;
  std::size_t span_ = 3;
};

SparseFilter build_lowpass(const ShearletConfig& config, const SpectrumLayout& layout) {
  SparseFilter f;
  const auto& d = config.dims;
  const std::size_t rank = d.size();
  const std::size_t n1 = rank > 1 ? d[1] : 1;
  const std::size_t n2 = rank > 2 ? d[2] : 1;
  std::size_t h = 0;
  // Separable, and a function of |w| only, hence exactly even.
  for (std::size_t k2 = 0; k2 < n2; ++k2) {
    const double f2 = rank > 2 ? window::lowpass(grid_frequency(k2, d[2]), config.lowpass_cutoff) : 1.0;
    for (std::size_t k1 = 0; k1 < n1; ++k1) {
      const double f1 = window::lowpass(grid_frequency(k1, d[1]), config.lowpass_cutoff);
      for (std::size_t k0 = 0; k0 < layout.half0; ++k0, ++h) {
        const double v = f2 * f1 * window::lowpass(grid_frequency(k0, d[0]), config.lowpass_cutoff);
        if (v > 0.0) push_sample(f, h, v);
      }
    }
  }
  return f;
}

}  // namespace

void ShearletConfig::validate() const {
  if (num_scales < 1) throw ConfigError("num_scales must be >= 1");
  if (shear_levels.size() != static_cast<std::size_t>(num_scales)) {
    throw ConfigError("shear_levels has " + std::to_string(shear_levels.size()) +
                      " entries, expected num_scales = " + std::to_string(num_scales));
  }
  for (int l : shear_levels) {
    if (l < 0 || l > 6) throw ConfigError("shear level " + std::to_string(l) + " outside [0, 6]");
  }
  if (dims.size() != 2 && dims.size() != 3) {
    throw ConfigError("shearlet systems need 2 or 3 dims, got " + std::to_string(dims.size()));
  }
  for (std::size_t d : dims) {
    if (d < 16) throw ConfigError("dimension " + std::to_string(d) + " below minimum 16");
    if (d % 2 != 0) throw ConfigError("dimension " + std::to_string(d) + " must be even");
  }
  if (!(lowpass_cutoff > 0.0 && lowpass_cutoff <= 1.0)) {
    throw ConfigError("lowpass_cutoff must lie in (0, 1]");
  }
}

ShearletConfig ShearletConfig::volumetric(const Dims3& d, int num_scales,
                                          std::vector<int> shear_levels) {
  ShearletConfig c;
  c.num_scales = num_scales;
  c.shear_levels = std::move(shear_levels);
  c.dims = {d.nz, d.nx, d.ny};
  return c;
}

ShearletConfig ShearletConfig::bscan(const Dims3& d, int num_scales,
                                     std::vector<int> shear_levels) {
  ShearletConfig c;
  c.num_scales = num_scales;
  c.shear_levels = std::move(shear_levels);
  c.dims = {d.nz, d.nx};
  return c;
}

std::string SubbandIndex::to_string() const {
  if (kind == SubbandKind::kLowpass) return "lowpass";
  return "j" + std::to_string(scale) + ".p" + std::to_string(pyramid) + ".k" +
         std::to_string(k1) + "," + std::to_string(k2);
}

std::size_t filter_count(const ShearletConfig& config) {
  config.validate();
  const std::size_t rank = config.dims.size();
  std::size_t count = 1;
  for (int l : config.shear_levels) {
    const std::size_t span = (std::size_t{1} << (l + 1)) + 1;
    std::size_t per_pyramid = 1;
    for (std::size_t a = 1; a < rank; ++a) per_pyramid *= span;
    count += rank * per_pyramid;
  }
  return count;
}

std::vector<SubbandIndex> enumerate_subbands(const ShearletConfig& config) {
  config.validate();
  const int rank = static_cast<int>(config.dims.size());
  std::vector<SubbandIndex> out;
  out.push_back({});
  for (int j = 0; j < config.num_scales; ++j) {
    const int shears = 1 << config.shear_levels[j];
    for (int p = 0; p < rank; ++p) {
      for (int k1 = -shears; k1 <= shears; ++k1) {
        if (rank == 2) {
          out.push_back({SubbandKind::kDirectional, j, p, k1, 0});
          continue;
        }
        for (int k2 = -shears; k2 <= shears; ++k2) {
          out.push_back({SubbandKind::kDirectional, j, p, k1, k2});
        }
      }
    }
  }
  return out;
}

ShearletSystem build_system(const ShearletConfig& config) {
  config.validate();
  ShearletSystem sys;
  sys.config_ = config;
  sys.layout_ = SpectrumLayout(config.dims);
  sys.indices_ = enumerate_subbands(config);
  sys.id_ = config_fingerprint(config);

  const int rank = static_cast<int>(config.dims.size());
  std::vector<std::pair<int, int>> blocks;
  for (int j = 0; j < config.num_scales; ++j) {
    for (int p = 0; p < rank; ++p) blocks.emplace_back(j, p);
  }
  std::vector<std::vector<SparseFilter>> built(blocks.size());
  parallel_for(blocks.size(), resolve_threads({}), [&](std::size_t b, int) {
    BlockBuilder builder(config, blocks[b].first, blocks[b].second);
    built[b] = builder.build(sys.layout_);
  });

  sys.filters_.reserve(sys.indices_.size());
  sys.filters_.push_back(build_lowpass(config, sys.layout_));
  for (auto& block : built) {
    for (auto& f : block) sys.filters_.push_back(std::move(f));
  }

  sys.weight_.assign(sys.layout_.spectrum_size(), 0.0);
  for (const auto& f : sys.filters_) {
    f.for_each([&](std::size_t h, double v) { sys.weight_[h] += v * v; });
  }
  auto [lo, hi] = std::minmax_element(sys.weight_.begin(), sys.weight_.end());
  sys.min_weight_ = *lo;
  sys.max_weight_ = *hi;
  if (!(sys.min_weight_ >= ShearletSystem::kMinWeight) || !std::isfinite(sys.max_weight_)) {
    throw FrameError("frame weight minimum " + std::to_string(sys.min_weight_) +
                     " below lower bound 1e-6");
  }
  return sys;
}

ShearletSystem build_system_2d(const ShearletConfig& config) {
  if (config.dims.size() != 2) throw ConfigError("expected a 2D configuration");
  return build_system(config);
}

ShearletSystem build_system_3d(const ShearletConfig& config) {
  if (config.dims.size() != 3) throw ConfigError("expected a 3D configuration");
  return build_system(config);
}

std::vector<double> ShearletSystem::densify(std::span<const double> half) const {
  const auto& d = config_.dims;
  const std::size_t rank = d.size();
  const std::size_t n0 = d[0];
  const std::size_t n1 = d[1];
  const std::size_t n2 = rank > 2 ? d[2] : 1;
  std::vector<double> full(n0 * n1 * n2, 0.0);
  for (std::size_t k2 = 0; k2 < n2; ++k2) {
    for (std::size_t k1 = 0; k1 < n1; ++k1) {
      for (std::size_t k0 = 0; k0 < n0; ++k0) {
        std::size_t h;
        if (k0 < layout_.half0) {
          h = k0 + layout_.half0 * (k1 + n1 * k2);
        } else {
          const std::size_t m0 = n0 - k0;
          const std::size_t m1 = (n1 - k1) % n1;
          const std::size_t m2 = (n2 - k2) % n2;
          h = m0 + layout_.half0 * (m1 + n1 * m2);
        }
        full[k0 + n0 * (k1 + n1 * k2)] = half[h];
      }
    }
  }
  return full;
}

std::vector<double> ShearletSystem::dense_filter(std::size_t i) const {
  std::vector<double> half(layout_.spectrum_size(), 0.0);
  filters_.at(i).for_each([&](std::size_t h, double v) { half[h] = v; });
  return densify(half);
}

std::vector<double> ShearletSystem::dense_weight() const { return densify(weight_); }

}  // namespace shearvol
