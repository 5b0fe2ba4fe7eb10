#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "shearvol/parallel.hpp"
#include "shearvol/shearlet_system.hpp"
#include "shearvol/volume.hpp"

namespace shearvol {

/// Undecimated shearlet coefficients: one real volume per system filter,
/// each with the grid extents of the analysed data.
struct CoefficientStack {
  std::vector<std::size_t> dims;
  std::vector<SubbandIndex> indices;
  std::vector<std::vector<double>> subbands;
  std::uint64_t system_id = 0;

  std::size_t size() const { return subbands.size(); }
};

/// Forward transform: subband_i = IFFT(FFT(f) * psi_i). The filters are real
/// and even, so conjugation is a no-op and every subband is real.
CoefficientStack decompose(const VolumeGrid& volume, const ShearletSystem& system,
                           const ExecutionPolicy& policy = {});

/// Only the listed filters, in the listed order. Meant for inspection: a
/// partial stack is rejected by reconstruct. Throws BoundsError for ids
/// outside the system.
CoefficientStack decompose_subbands(const VolumeGrid& volume, const ShearletSystem& system,
                                    std::span<const std::size_t> which,
                                    const ExecutionPolicy& policy = {});

/// Dual-frame synthesis: IFFT(sum_i FFT(c_i) * psi_i / W). The returned grid
/// carries no pitch/range metadata.
VolumeGrid reconstruct(const CoefficientStack& coeffs, const ShearletSystem& system,
                       const ExecutionPolicy& policy = {});

/// Adjoint of decompose: IFFT(sum_i FFT(g_i) * psi_i), without W division.
VolumeGrid synthesize_unweighted(const CoefficientStack& coeffs, const ShearletSystem& system,
                                 const ExecutionPolicy& policy = {});

/// 2D transform of the B-scan at slow-scan index `slice` with a 2D system of
/// dims (nz, nx).
CoefficientStack decompose_bscan_2d(const VolumeGrid& volume, const ShearletSystem& system2d,
                                    std::size_t slice, const ExecutionPolicy& policy = {});

/// Inverse of decompose_bscan_2d; returns an (nz, nx, 1) grid.
VolumeGrid reconstruct_bscan_2d(const CoefficientStack& coeffs, const ShearletSystem& system2d,
                                const ExecutionPolicy& policy = {});

}  // namespace shearvol
