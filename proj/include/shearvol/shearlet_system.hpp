#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shearvol/spectrum.hpp"
#include "shearvol/volume.hpp"

namespace shearvol {

/// Parameters of a cone-adapted band-limited shearlet frame.
///
/// `dims` lists the grid extents in volume axis order: (nz, nx) for 2D
/// B-scan systems, (nz, nx, ny) for volumetric ones. Scale j uses shears
/// |k| <= 2^shear_levels[j] along each sheared axis.
struct ShearletConfig {
  int num_scales = 2;
  std::vector<int> shear_levels{0, 1};
  std::vector<std::size_t> dims;
  bool threshold_lowpass = true;
  /// Outer edge of the lowpass window as a fraction of Nyquist.
  double lowpass_cutoff = 0.125;

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
  std::size_t dimensionality() const { return dims.size(); }

  static ShearletConfig volumetric(const Dims3& d, int num_scales = 2,
                                   std::vector<int> shear_levels = {0, 1});
  static ShearletConfig bscan(const Dims3& d, int num_scales = 2,
                              std::vector<int> shear_levels = {0, 1});
};

enum class SubbandKind { kLowpass, kDirectional };

/// Identity of one filter: the lowpass, or (scale, pyramid, shears).
/// `pyramid` is the dominant frequency axis (0 = depth). In 2D only k1 is
/// used and k2 stays 0.
struct SubbandIndex {
  SubbandKind kind = SubbandKind::kLowpass;
  int scale = -1;
  int pyramid = -1;
  int k1 = 0;
  int k2 = 0;

  bool operator==(const SubbandIndex&) const = default;
  std::string to_string() const;
};

/// Frequency response stored sparsely over the half spectrum as runs of
/// consecutive nonzero samples.
struct SparseFilter {
  struct Run {
    std::size_t begin = 0;   // first half-spectrum index
    std::size_t length = 0;
    std::size_t offset = 0;  // into values
  };
  std::vector<Run> runs;
  std::vector<double> values;

  std::size_t nonzeros() const { return values.size(); }

  template <typename F>
  void for_each(F&& f) const {
    for (const Run& r : runs) {
      const double* v = values.data() + r.offset;
      for (std::size_t t = 0; t < r.length; ++t) f(r.begin + t, v[t]);
    }
  }
};

/// 1 + sum_j C * (2^(L_j + 1) + 1)^(D - 1), C = D cones/pyramids.
std::size_t filter_count(const ShearletConfig& config);

/// Every SubbandIndex of a config in canonical order: lowpass, then
/// lexicographic by (scale, pyramid, k1, k2).
std::vector<SubbandIndex> enumerate_subbands(const ShearletConfig& config);

/// An immutable, shareable bank of real, non-negative, even-symmetric
/// frequency responses on the grid `config.dims`, with the frame weight
/// W = sum_i psi_i^2 used for dual-frame synthesis.
class ShearletSystem {
 public:
  /// Minimum admissible value of W anywhere on the grid.
  static constexpr double kMinWeight = 1e-6;

  const ShearletConfig& config() const { return config_; }
  std::size_t dimensionality() const { return config_.dims.size(); }
  std::size_t size() const { return filters_.size(); }

  const SubbandIndex& index(std::size_t i) const { return indices_[i]; }
  const std::vector<SubbandIndex>& indices() const { return indices_; }
  const SparseFilter& filter(std::size_t i) const { return filters_[i]; }
  const SpectrumLayout& layout() const { return layout_; }

  /// W over the half spectrum.
  std::span<const double> weight() const { return weight_; }
  double min_weight() const { return min_weight_; }
  double max_weight() const { return max_weight_; }

  /// Filter i on the full frequency grid in DFT order (DC at index 0),
  /// laid out like a volume of `config().dims`.
  std::vector<double> dense_filter(std::size_t i) const;
  std::vector<double> dense_weight() const;

  /// Fingerprint of the generating configuration.
  std::uint64_t id() const { return id_; }

 private:
  friend ShearletSystem build_system(const ShearletConfig&);

  ShearletConfig config_;
  SpectrumLayout layout_;
  std::vector<SubbandIndex> indices_;
  std::vector<SparseFilter> filters_;
  std::vector<double> weight_;
  double min_weight_ = 0.0;
  double max_weight_ = 0.0;
  std::uint64_t id_ = 0;

  std::vector<double> densify(std::span<const double> half) const;
};

/// Builds a 2D or 3D system depending on config.dims.size().
ShearletSystem build_system(const ShearletConfig& config);
/// Same as build_system but insists on a 2D / 3D config.
ShearletSystem build_system_2d(const ShearletConfig& config);
ShearletSystem build_system_3d(const ShearletConfig& config);

/// Window primitives, exposed for testing.
namespace window {
/// x^4 (35 - 84x + 70x^2 - 20x^3) on [0, 1], clamped outside.
double meyer_poly(double x);
/// 1D lowpass: 1 on |w| <= cutoff/2, smooth Meyer decay, 0 for |w| >= cutoff.
double lowpass(double w, double cutoff);
/// Radial band for scale j of num_scales; the last scale is open to Nyquist.
double radial(double w, int j, int num_scales, double cutoff);
/// Angular bump supported on [-1, 1] with sum_k bump(x - k)^2 == 1.
double bump(double x);
}  // namespace window

}  // namespace shearvol
