#include "shearvol/transform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fft.hpp"
#include "shearvol/errors.hpp"
#include "spectral.hpp"

namespace shearvol {

namespace {

using detail::RealBuffer;
using detail::RealFft;
using detail::SpectrumBuffer;
using detail::Workspace;

std::string dims_string(const std::vector<std::size_t>& d) {
  std::string s;
  for (std::size_t a = 0; a < d.size(); ++a) s += (a ? "x" : "") + std::to_string(d[a]);
  return s;
}

CoefficientStack analyse(std::span<const double> samples, const ShearletSystem& system,
                         std::span<const std::size_t> which, const ExecutionPolicy& policy) {
  const auto& dims = system.config().dims;
  RealFft fft(dims);
  RealBuffer input(samples.begin(), samples.end());
  SpectrumBuffer x = fft.make_spectrum();
  fft.forward(input, x);

  CoefficientStack stack;
  stack.dims = dims;
  stack.system_id = system.id();
  stack.indices.reserve(which.size());
  for (std::size_t f : which) stack.indices.push_back(system.index(f));
  stack.subbands.resize(which.size());
  if (which.empty()) return stack;

  const int threads = static_cast<int>(std::min<std::size_t>(resolve_threads(policy), which.size()));
  std::vector<Workspace> ws(threads);
  parallel_for(which.size(), threads, [&](std::size_t i, int worker) {
    Workspace& w = ws[worker];
    if (w.real.empty()) {
      w.real = fft.make_real();
      w.spectrum = fft.make_spectrum();
    }
    detail::apply_filter(system.filter(which[i]), x, w.spectrum);
    fft.inverse(w.spectrum, w.real);
    stack.subbands[i].assign(w.real.begin(), w.real.end());
  });
  return stack;
}

std::vector<std::size_t> all_filters(const ShearletSystem& system) {
  std::vector<std::size_t> v(system.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
  return v;
}

void check_volume(const VolumeGrid& volume, const ShearletSystem& system) {
  if (system.dimensionality() != 3) throw ShapeError("decompose needs a 3D system");
  const auto& d = system.config().dims;
  const Dims3 expected{d[0], d[1], d[2]};
  if (volume.dims() != expected) {
    throw ShapeError("volume dims " + volume.dims().to_string() + " do not match system dims " +
                     expected.to_string());
  }
  volume.require_finite();
}

void check_stack(const CoefficientStack& coeffs, const ShearletSystem& system) {
  if (coeffs.dims != system.config().dims) {
    throw ShapeError("coefficient dims " + dims_string(coeffs.dims) + " do not match system dims " +
                     dims_string(system.config().dims));
  }
  if (coeffs.subbands.size() != system.size()) {
    throw ShapeError("stack holds " + std::to_string(coeffs.subbands.size()) +
                     " subbands, system has " + std::to_string(system.size()));
  }
  if (!coeffs.indices.empty() && coeffs.indices != system.indices()) {
    throw ShapeError("subband order does not match the system");
  }
  const std::size_t n = SpectrumLayout(coeffs.dims).real_size();
  for (const auto& s : coeffs.subbands) {
    if (s.size() != n) throw ShapeError("subband volume has wrong size");
  }
}

std::vector<double> synthesize(const CoefficientStack& coeffs, const ShearletSystem& system,
                               const ExecutionPolicy& policy, bool weighted) {
  check_stack(coeffs, system);
  RealFft fft(system.config().dims);
  auto acc = detail::accumulate_synthesis(
      system, fft,
      [&](std::size_t i, Workspace& w) {
        std::copy(coeffs.subbands[i].begin(), coeffs.subbands[i].end(), w.real.begin());
      },
      policy);
  if (weighted) detail::divide_by_weight(system, acc);
  RealBuffer out = fft.make_real();
  fft.inverse(acc, out);
  return {out.begin(), out.end()};
}

Dims3 to_dims3(const std::vector<std::size_t>& d) {
  return {d[0], d[1], d.size() > 2 ? d[2] : 1};
}

}  // namespace

CoefficientStack decompose(const VolumeGrid& volume, const ShearletSystem& system,
                           const ExecutionPolicy& policy) {
  check_volume(volume, system);
  return analyse(volume.values(), system, all_filters(system), policy);
}

CoefficientStack decompose_subbands(const VolumeGrid& volume, const ShearletSystem& system,
                                    std::span<const std::size_t> which,
                                    const ExecutionPolicy& policy) {
  check_volume(volume, system);
  for (std::size_t f : which) {
    if (f >= system.size()) {
      throw BoundsError("subband " + std::to_string(f) + " outside [0, " +
                        std::to_string(system.size()) + ")");
    }
  }
  return analyse(volume.values(), system, which, policy);
}

VolumeGrid reconstruct(const CoefficientStack& coeffs, const ShearletSystem& system,
                       const ExecutionPolicy& policy) {
  auto values = synthesize(coeffs, system, policy, true);
  return VolumeGrid(to_dims3(coeffs.dims), std::move(values));
}

VolumeGrid synthesize_unweighted(const CoefficientStack& coeffs, const ShearletSystem& system,
                                 const ExecutionPolicy& policy) {
  auto values = synthesize(coeffs, system, policy, false);
  return VolumeGrid(to_dims3(coeffs.dims), std::move(values));
}

CoefficientStack decompose_bscan_2d(const VolumeGrid& volume, const ShearletSystem& system2d,
                                    std::size_t slice, const ExecutionPolicy& policy) {
  if (system2d.dimensionality() != 2) throw ShapeError("B-scan transform needs a 2D system");
  const auto& d = system2d.config().dims;
  if (volume.dims().nz != d[0] || volume.dims().nx != d[1]) {
    throw ShapeError("B-scan plane " + std::to_string(volume.dims().nz) + "x" +
                     std::to_string(volume.dims().nx) + " does not match system dims " +
                     dims_string(d));
  }
  if (slice >= volume.dims().ny) {
    throw BoundsError("slice index " + std::to_string(slice) + " outside [0, " +
                      std::to_string(volume.dims().ny) + ")");
  }
  auto plane = volume.bscan(slice);
  for (double v : plane) {
    if (!std::isfinite(v)) throw ValidationError("B-scan contains non-finite samples");
  }
  return analyse(plane, system2d, all_filters(system2d), policy);
}

VolumeGrid reconstruct_bscan_2d(const CoefficientStack& coeffs, const ShearletSystem& system2d,
                                const ExecutionPolicy& policy) {
  if (system2d.dimensionality() != 2) throw ShapeError("B-scan transform needs a 2D system");
  return reconstruct(coeffs, system2d, policy);
}

}  // namespace shearvol
