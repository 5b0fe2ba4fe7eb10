#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "shearvol/parallel.hpp"
#include "shearvol/shearlet_system.hpp"
#include "shearvol/volume.hpp"

namespace shearvol {

enum class DenoiseMode { kVolume3D, kBscan2D };

/// Hard-thresholding parameters. sigma is the noise level in intensity
/// units of data normalized to [0, 255]; it is supplied, never estimated.
struct DenoiseParams {
  double sigma = 30.0;
  double tl = 2.5;
  DenoiseMode mode = DenoiseMode::kVolume3D;
  /// The lowpass subband is thresholded unless this or the system config's
  /// threshold_lowpass is false.
  bool threshold_lowpass = true;
  /// Subbands whose standard deviation falls below this are zeroed.
  double sigma_floor = 1e-9;
  /// Clamp the output to the input's declared intensity range.
  bool clamp = true;

  void validate() const;

  static DenoiseParams oct() { return {}; }
  static DenoiseParams octa() {
    DenoiseParams p;
    p.tl = 1.5;
    return p;
  }
};

struct SubbandStats {
  std::size_t subband = 0;  // position in the system's filter list
  SubbandIndex index;
  long slice = -1;          // B-scan index in 2D mode, -1 in 3D mode
  double sigma = 0.0;       // population std of the subband coefficients
  double threshold = 0.0;
  double kept_fraction = 0.0;
};

/// Hard-thresholds one subband in place with T = tl * sigma^2 / sigma_jl,
/// keeping c where |c| > T. A subband with sigma_jl below the floor is
/// zeroed and reported with sigma 0 and an infinite threshold.
SubbandStats threshold_subband(std::span<double> coeffs, const DenoiseParams& params);

/// Hard threshold at a fixed T; returns the number of kept coefficients.
std::size_t apply_threshold(std::span<double> coeffs, double threshold);

struct DenoiseResult {
  VolumeGrid volume;
  std::vector<SubbandStats> stats;
};

/// Streamed 3D shearlet denoising: per filter, one analysis pass, threshold,
/// and accumulation into a running synthesis spectrum; the full coefficient
/// stack is never held in memory.
DenoiseResult denoise_volume(const VolumeGrid& volume, const ShearletSystem& system,
                             const DenoiseParams& params, const ExecutionPolicy& policy = {});
DenoiseResult denoise_volume(const VolumeGrid& volume, const ShearletConfig& config,
                             const DenoiseParams& params, const ExecutionPolicy& policy = {});

/// Per-B-scan 2D variant; the system has dims (nz, nx).
DenoiseResult denoise_volume_2d(const VolumeGrid& volume, const ShearletSystem& system2d,
                                const DenoiseParams& params, const ExecutionPolicy& policy = {});
DenoiseResult denoise_volume_2d(const VolumeGrid& volume, const ShearletConfig& config2d,
                                const DenoiseParams& params, const ExecutionPolicy& policy = {});

/// Reference formulation reconstruct(threshold(decompose(f))) holding the
/// whole stack. Same semantics as denoise_volume / denoise_volume_2d
/// depending on the system's dimensionality.
DenoiseResult denoise_materialized(const VolumeGrid& volume, const ShearletSystem& system,
                                   const DenoiseParams& params,
                                   const ExecutionPolicy& policy = {});

/// Aligned text table: subband, index, slice, sigma_jl, T_jl, kept fraction.
std::string format_stats_table(const std::vector<SubbandStats>& stats);

}  // namespace shearvol
