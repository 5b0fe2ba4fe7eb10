#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "shearvol/volume.hpp"

namespace shearvol {

/// Mean squared difference over all samples.
double mse(std::span<const double> a, std::span<const double> reference);
double mse(const VolumeGrid& a, const VolumeGrid& reference);
double mse(const Image& a, const Image& reference);

/// PSNR in dB; `identical` marks mse == 0, where db is +infinity.
struct Psnr {
  double db = 0.0;
  bool identical = false;
};
Psnr psnr(std::span<const double> a, std::span<const double> reference, double data_range = 255.0);
Psnr psnr(const VolumeGrid& a, const VolumeGrid& reference, double data_range = 255.0);
Psnr psnr(const Image& a, const Image& reference, double data_range = 255.0);

struct SsimParams {
  int window = 11;
  double gaussian_sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double data_range = 255.0;
};

/// Mean local SSIM over every window position that lies fully inside the
/// image. Throws ShapeError if the image is smaller than the window.
double ssim(const Image& a, const Image& reference, const SsimParams& params = {});
/// Mean of the B-scan (fixed slow-scan index) SSIMs.
double ssim(const VolumeGrid& a, const VolumeGrid& reference, const SsimParams& params = {});

/// Foveal avascular zone disc and parafoveal annulus for the OCTA SNR.
struct AnnulusSpec {
  /// Pixel coordinates; defaults to the image center ((w-1)/2, (h-1)/2).
  std::optional<std::pair<double, double>> center;
  double inner_diameter_mm = 0.6;
  double outer_diameter_mm = 2.5;
  double pixel_pitch_mm = 3.0 / 245.0;

  void validate() const;
};

/// Pixel index sets: FAZ is r <= inner/2, parafovea is inner/2 < r <= outer/2,
/// with r the distance of the pixel center from the annulus center in pixels.
struct AnnulusRegions {
  std::vector<std::size_t> faz;
  std::vector<std::size_t> parafovea;
};
AnnulusRegions annulus_regions(std::size_t width, std::size_t height, const AnnulusSpec& roi);

/// (mean parafovea - mean FAZ) / std FAZ on an en-face image (population std).
double octa_snr(const Image& enface, const AnnulusSpec& roi);

/// One machine-readable metric line.
struct MetricRecord {
  std::string name;
  double value = 0.0;
  std::string params;  // space separated key=value pairs
};
/// "name value params" lines, one per record, no header.
std::string format_records(const std::vector<MetricRecord>& records);
/// Aligned table with a comment header line.
std::string format_table(const std::vector<MetricRecord>& records, const std::string& header);

}  // namespace shearvol
