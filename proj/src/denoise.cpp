#include "shearvol/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "fft.hpp"
#include "shearvol/errors.hpp"
#include "shearvol/transform.hpp"
#include "spectral.hpp"

namespace shearvol {

namespace {

using detail::RealBuffer;
using detail::RealFft;
using detail::SpectrumBuffer;
using detail::Workspace;

double population_std(std::span<const double> c) {
  if (c.empty()) return 0.0;
  double mean = 0.0;
  for (double v : c) mean += v;
  mean /= static_cast<double>(c.size());
  double ss = 0.0;
  for (double v : c) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(c.size()));
}

bool thresholds_lowpass(const ShearletSystem& system, const DenoiseParams& params) {
  return params.threshold_lowpass && system.config().threshold_lowpass;
}

SubbandStats process_subband(std::span<double> coeffs, std::size_t i,
                             const ShearletSystem& system, const DenoiseParams& params,
                             long slice) {
  SubbandStats s;
  const bool exempt = system.index(i).kind == SubbandKind::kLowpass &&
                      !thresholds_lowpass(system, params);
  if (exempt) {
    s.sigma = population_std(coeffs);
    s.threshold = 0.0;
    s.kept_fraction = 1.0;
  } else {
    s = threshold_subband(coeffs, params);
  }
  s.subband = i;
  s.index = system.index(i);
  s.slice = slice;
  return s;
}

void clamp_to_range(VolumeGrid& v, IntensityRange r) {
  for (double& x : v.values()) x = std::clamp(x, r.lo, r.hi);
}

// Streamed pipeline over one grid of the system's dims.
std::vector<double> denoise_grid(std::span<const double> samples, const ShearletSystem& system,
                                 const RealFft& fft, const DenoiseParams& params,
                                 const ExecutionPolicy& policy, long slice,
                                 std::vector<SubbandStats>& stats) {
  RealBuffer input(samples.begin(), samples.end());
  SpectrumBuffer x = fft.make_spectrum();
  fft.forward(input, x);

  std::vector<SubbandStats> local(system.size());
  auto acc = detail::accumulate_synthesis(
      system, fft,
      [&](std::size_t i, Workspace& w) {
        detail::apply_filter(system.filter(i), x, w.spectrum);
        fft.inverse(w.spectrum, w.real);
        local[i] = process_subband(w.real, i, system, params, slice);
      },
      policy);
  detail::divide_by_weight(system, acc);
  RealBuffer out = fft.make_real();
  fft.inverse(acc, out);
  stats.insert(stats.end(), local.begin(), local.end());
  return {out.begin(), out.end()};
}

void check_volume_vs_system(const VolumeGrid& volume, const ShearletSystem& system) {
  const auto& d = system.config().dims;
  if (system.dimensionality() == 3) {
    if (volume.dims() != Dims3{d[0], d[1], d[2]}) {
      throw ShapeError("volume dims " + volume.dims().to_string() +
                       " do not match the 3D system");
    }
  } else if (volume.dims().nz != d[0] || volume.dims().nx != d[1]) {
    throw ShapeError("B-scan plane of " + volume.dims().to_string() +
                     " does not match the 2D system");
  }
}

}  // namespace

void DenoiseParams::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterError("sigma must be > 0");
  if (!(tl >= 0.0) || !std::isfinite(tl)) throw ParameterError("tl must be >= 0");
  if (!(sigma_floor >= 0.0)) throw ParameterError("sigma_floor must be >= 0");
}

SubbandStats threshold_subband(std::span<double> coeffs, const DenoiseParams& params) {
  for (double v : coeffs) {
    if (!std::isfinite(v)) throw ValidationError("subband contains non-finite coefficients");
  }
  SubbandStats s;
  const double sd = population_std(coeffs);
  if (sd < params.sigma_floor) {
    std::fill(coeffs.begin(), coeffs.end(), 0.0);
    s.sigma = 0.0;
    s.threshold = std::numeric_limits<double>::infinity();
    s.kept_fraction = 0.0;
    return s;
  }
  s.sigma = sd;
  s.threshold = params.tl * params.sigma * params.sigma / sd;
  const std::size_t kept = apply_threshold(coeffs, s.threshold);
  s.kept_fraction = coeffs.empty() ? 0.0
                                   : static_cast<double>(kept) / static_cast<double>(coeffs.size());
  return s;
}

std::size_t apply_threshold(std::span<double> coeffs, double threshold) {
  std::size_t kept = 0;
  for (double& c : coeffs) {
    if (std::abs(c) > threshold) {
      ++kept;
    } else {
      c = 0.0;
    }
  }
  return kept;
}

DenoiseResult denoise_volume(const VolumeGrid& volume, const ShearletSystem& system,
                             const DenoiseParams& params, const ExecutionPolicy& policy) {
  params.validate();
  if (params.mode != DenoiseMode::kVolume3D) throw ParameterError("denoise_volume needs 3D mode");
  if (system.dimensionality() != 3) throw ShapeError("denoise_volume needs a 3D system");
  check_volume_vs_system(volume, system);
  volume.require_finite();

  RealFft fft(system.config().dims);
  DenoiseResult r;
  auto values = denoise_grid(volume.values(), system, fft, params, policy, -1, r.stats);
  r.volume = VolumeGrid(volume.dims(), std::move(values));
  r.volume.set_pitch(volume.pitch());
  r.volume.set_range(volume.range());
  if (params.clamp) clamp_to_range(r.volume, volume.range());
  return r;
}

DenoiseResult denoise_volume(const VolumeGrid& volume, const ShearletConfig& config,
                             const DenoiseParams& params, const ExecutionPolicy& policy) {
  return denoise_volume(volume, build_system_3d(config), params, policy);
}

DenoiseResult denoise_volume_2d(const VolumeGrid& volume, const ShearletSystem& system2d,
                                const DenoiseParams& params, const ExecutionPolicy& policy) {
  params.validate();
  if (params.mode != DenoiseMode::kBscan2D) throw ParameterError("denoise_volume_2d needs 2D mode");
  if (system2d.dimensionality() != 2) throw ShapeError("denoise_volume_2d needs a 2D system");
  check_volume_vs_system(volume, system2d);
  volume.require_finite();

  const std::size_t ny = volume.dims().ny;
  RealFft fft(system2d.config().dims);
  DenoiseResult r;
  r.volume = VolumeGrid(volume.dims());
  r.volume.set_pitch(volume.pitch());
  r.volume.set_range(volume.range());

  // Slices are independent; each runs its filters serially in filter order,
  // so results do not depend on the thread count.
  std::vector<std::vector<SubbandStats>> per_slice(ny);
  ExecutionPolicy inner = policy;
  inner.threads = 1;
  parallel_for(ny, resolve_threads(policy), [&](std::size_t y, int) {
    auto out = denoise_grid(volume.bscan(y), system2d, fft, params, inner,
                            static_cast<long>(y), per_slice[y]);
    std::copy(out.begin(), out.end(), r.volume.bscan(y).begin());
  });
  for (auto& s : per_slice) r.stats.insert(r.stats.end(), s.begin(), s.end());
  if (params.clamp) clamp_to_range(r.volume, volume.range());
  return r;
}

DenoiseResult denoise_volume_2d(const VolumeGrid& volume, const ShearletConfig& config2d,
                                const DenoiseParams& params, const ExecutionPolicy& policy) {
  return denoise_volume_2d(volume, build_system_2d(config2d), params, policy);
}

DenoiseResult denoise_materialized(const VolumeGrid& volume, const ShearletSystem& system,
                                   const DenoiseParams& params, const ExecutionPolicy& policy) {
  params.validate();
  check_volume_vs_system(volume, system);
  volume.require_finite();
  DenoiseResult r;
  r.volume = VolumeGrid(volume.dims());
  r.volume.set_pitch(volume.pitch());
  r.volume.set_range(volume.range());

  auto run = [&](CoefficientStack stack, long slice) {
    for (std::size_t i = 0; i < stack.size(); ++i) {
      r.stats.push_back(process_subband(stack.subbands[i], i, system, params, slice));
    }
    return reconstruct(stack, system, policy);
  };

  if (system.dimensionality() == 3) {
    auto rec = run(decompose(volume, system, policy), -1);
    std::copy(rec.values().begin(), rec.values().end(), r.volume.values().begin());
  } else {
    for (std::size_t y = 0; y < volume.dims().ny; ++y) {
      auto rec = run(decompose_bscan_2d(volume, system, y, policy), static_cast<long>(y));
      std::copy(rec.values().begin(), rec.values().end(), r.volume.bscan(y).begin());
    }
  }
  if (params.clamp) clamp_to_range(r.volume, volume.range());
  return r;
}

std::string format_stats_table(const std::vector<SubbandStats>& stats) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-8s %-16s %6s %14s %14s %8s\n", "subband", "index", "slice",
                "sigma_jl", "T_jl", "kept");
  out += line;
  for (const auto& s : stats) {
    std::snprintf(line, sizeof line, "%-8zu %-16s %6ld %14.6g %14.6g %8.5f\n", s.subband,
                  s.index.to_string().c_str(), s.slice, s.sigma, s.threshold, s.kept_fraction);
    out += line;
  }
  return out;
}

}  // namespace shearvol
