#include "shearvol/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "shearvol/errors.hpp"

namespace shearvol {

namespace {

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) {
    throw ShapeError("operands differ in size: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

// Valid-mode separable filtering of a w x h image with a 1D kernel.
std::vector<double> filter_valid(std::span<const double> img, std::size_t w, std::size_t h,
                                 const std::vector<double>& k) {
  const std::size_t n = k.size();
  const std::size_t ow = w - n + 1;
  const std::size_t oh = h - n + 1;
  std::vector<double> rows(ow * h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double s = 0.0;
      for (std::size_t t = 0; t < n; ++t) s += k[t] * img[x + t + w * y];
      rows[x + ow * y] = s;
    }
  }
  std::vector<double> out(ow * oh);
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double s = 0.0;
      for (std::size_t t = 0; t < n; ++t) s += k[t] * rows[x + ow * (y + t)];
      out[x + ow * y] = s;
    }
  }
  return out;
}

double ssim_plane(std::span<const double> a, std::span<const double> b, std::size_t w,
                  std::size_t h, const SsimParams& p) {
  const auto win = static_cast<std::size_t>(p.window);
  if (p.window < 1 || w < win || h < win) {
    throw ShapeError("image " + std::to_string(w) + "x" + std::to_string(h) +
                     " smaller than the SSIM window");
  }
  // The 2D Gaussian is the outer product of this normalized 1D kernel.
  std::vector<double> k(win);
  const double c = 0.5 * static_cast<double>(win - 1);
  double total = 0.0;
  for (std::size_t t = 0; t < win; ++t) {
    const double d = static_cast<double>(t) - c;
    k[t] = std::exp(-d * d / (2.0 * p.gaussian_sigma * p.gaussian_sigma));
    total += k[t];
  }
  for (double& v : k) v /= total;

  std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  auto mu_a = filter_valid(a, w, h, k);
  auto mu_b = filter_valid(b, w, h, k);
  auto e_aa = filter_valid(aa, w, h, k);
  auto e_bb = filter_valid(bb, w, h, k);
  auto e_ab = filter_valid(ab, w, h, k);

  const double c1 = (p.k1 * p.data_range) * (p.k1 * p.data_range);
  const double c2 = (p.k2 * p.data_range) * (p.k2 * p.data_range);
  double sum = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    const double va = e_aa[i] - ma * ma;
    const double vb = e_bb[i] - mb * mb;
    const double cov = e_ab[i] - ma * mb;
    sum += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
           ((ma * ma + mb * mb + c1) * (va + vb + c2));
  }
  return sum / static_cast<double>(mu_a.size());
}

}  // namespace

double mse(std::span<const double> a, std::span<const double> reference) {
  require_same_size(a.size(), reference.size());
  if (a.empty()) throw ShapeError("mse of empty data");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - reference[i];
    s += d * d;
  }
  return s / static_cast<double>(a.size());
}

double mse(const VolumeGrid& a, const VolumeGrid& reference) {
  if (a.dims() != reference.dims()) {
    throw ShapeError("volume dims differ: " + a.dims().to_string() + " vs " +
                     reference.dims().to_string());
  }
  return mse(a.values(), reference.values());
}

double mse(const Image& a, const Image& reference) {
  if (a.width() != reference.width() || a.height() != reference.height()) {
    throw ShapeError("image dims differ");
  }
  return mse(a.values(), reference.values());
}

Psnr psnr(std::span<const double> a, std::span<const double> reference, double data_range) {
  if (!(data_range > 0.0)) throw ParameterError("data_range must be > 0");
  const double m = mse(a, reference);
  if (m == 0.0) return {std::numeric_limits<double>::infinity(), true};
  return {10.0 * std::log10(data_range * data_range / m), false};
}

Psnr psnr(const VolumeGrid& a, const VolumeGrid& reference, double data_range) {
  if (a.dims() != reference.dims()) throw ShapeError("volume dims differ");
  return psnr(a.values(), reference.values(), data_range);
}

Psnr psnr(const Image& a, const Image& reference, double data_range) {
  if (a.width() != reference.width() || a.height() != reference.height()) {
    throw ShapeError("image dims differ");
  }
  return psnr(a.values(), reference.values(), data_range);
}

double ssim(const Image& a, const Image& reference, const SsimParams& params) {
  if (a.width() != reference.width() || a.height() != reference.height()) {
    throw ShapeError("image dims differ");
  }
  return ssim_plane(a.values(), reference.values(), a.width(), a.height(), params);
}

double ssim(const VolumeGrid& a, const VolumeGrid& reference, const SsimParams& params) {
  if (a.dims() != reference.dims()) throw ShapeError("volume dims differ");
  const auto& d = a.dims();
  double sum = 0.0;
  for (std::size_t y = 0; y < d.ny; ++y) {
    sum += ssim_plane(a.bscan(y), reference.bscan(y), d.nz, d.nx, params);
  }
  return sum / static_cast<double>(d.ny);
}

void AnnulusSpec::validate() const {
  if (!(pixel_pitch_mm > 0.0)) throw ParameterError("pixel pitch must be > 0");
  if (!(inner_diameter_mm > 0.0 && inner_diameter_mm < outer_diameter_mm)) {
    throw ParameterError("annulus needs 0 < inner diameter < outer diameter");
  }
}

AnnulusRegions annulus_regions(std::size_t width, std::size_t height, const AnnulusSpec& roi) {
  roi.validate();
  const double cx = roi.center ? roi.center->first : 0.5 * (static_cast<double>(width) - 1.0);
  const double cy = roi.center ? roi.center->second : 0.5 * (static_cast<double>(height) - 1.0);
  const double r_in = 0.5 * roi.inner_diameter_mm / roi.pixel_pitch_mm;
  const double r_out = 0.5 * roi.outer_diameter_mm / roi.pixel_pitch_mm;
  const double w = static_cast<double>(width);
  const double h = static_cast<double>(height);
  if (cx - r_out < -0.5 || cy - r_out < -0.5 || cx + r_out > w - 0.5 || cy + r_out > h - 0.5) {
    throw BoundsError("annulus of outer radius " + std::to_string(r_out) +
                      " px does not fit the " + std::to_string(width) + "x" +
                      std::to_string(height) + " image");
  }
  AnnulusRegions regions;
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const double r = std::hypot(static_cast<double>(x) - cx, static_cast<double>(y) - cy);
      if (r <= r_in) {
        regions.faz.push_back(x + width * y);
      } else if (r <= r_out) {
        regions.parafovea.push_back(x + width * y);
      }
    }
  }
  if (regions.parafovea.size() < 10) throw ParameterError("annulus covers fewer than 10 pixels");
  if (regions.faz.empty()) throw ParameterError("FAZ disc covers no pixels");
  return regions;
}

double octa_snr(const Image& enface, const AnnulusSpec& roi) {
  const auto regions = annulus_regions(enface.width(), enface.height(), roi);
  const auto v = enface.values();
  double faz_mean = 0.0;
  for (std::size_t i : regions.faz) faz_mean += v[i];
  faz_mean /= static_cast<double>(regions.faz.size());
  double faz_ss = 0.0;
  for (std::size_t i : regions.faz) faz_ss += (v[i] - faz_mean) * (v[i] - faz_mean);
  const double faz_std = std::sqrt(faz_ss / static_cast<double>(regions.faz.size()));
  if (faz_std < 1e-12) throw MetricUndefinedError("FAZ region has zero variance");
  double para_mean = 0.0;
  for (std::size_t i : regions.parafovea) para_mean += v[i];
  para_mean /= static_cast<double>(regions.parafovea.size());
  return (para_mean - faz_mean) / faz_std;
}

std::string format_records(const std::vector<MetricRecord>& records) {
  std::string out;
  char buf[64];
  for (const auto& r : records) {
    if (std::isinf(r.value)) {
      std::snprintf(buf, sizeof buf, "%s", r.value > 0 ? "inf" : "-inf");
    } else {
      std::snprintf(buf, sizeof buf, "%.10g", r.value);
    }
    out += r.name + " " + buf;
    if (!r.params.empty()) out += " " + r.params;
    out += "\n";
  }
  return out;
}

std::string format_table(const std::vector<MetricRecord>& records, const std::string& header) {
  std::string out = "# " + header + "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %16s  %s\n", "metric", "value", "parameters");
  out += line;
  for (const auto& r : records) {
    char val[64];
    if (std::isinf(r.value)) {
      std::snprintf(val, sizeof val, "%s", r.value > 0 ? "inf" : "-inf");
    } else {
      std::snprintf(val, sizeof val, "%.6f", r.value);
    }
    std::snprintf(line, sizeof line, "%-10s %16s  %s\n", r.name.c_str(), val,
                  r.params.empty() ? "-" : r.params.c_str());
    out += line;
  }
  return out;
}

}  // namespace shearvol
