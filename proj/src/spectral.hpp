#pragma once

// Shared frequency-domain machinery for the transform and the streamed
// denoiser: filtering over sparse supports and ordered/thread-local
// accumulation of synthesis contributions.

#include <functional>
#include <vector>

#include "fft.hpp"
#include "shearvol/parallel.hpp"
#include "shearvol/shearlet_system.hpp"

namespace shearvol::detail {

struct Workspace {
  RealBuffer real;
  SpectrumBuffer spectrum;
  std::vector<Complex> compact;
};

// out = x * psi on psi's support, zero elsewhere.
void apply_filter(const SparseFilter& f, const SpectrumBuffer& x, SpectrumBuffer& out);

// Fills `ws.real` with the real coefficients of subband i.
using CoefficientSource = std::function<void(std::size_t i, Workspace& ws)>;

// sum_i FFT(source(i)) * psi_i over all filters of `system`, in the half
// spectrum. With policy.deterministic the sum runs in filter order whatever
// the thread count; otherwise each worker sums a static share and the
// partial sums are combined in worker order.
SpectrumBuffer accumulate_synthesis(const ShearletSystem& system, const RealFft& fft,
                                    const CoefficientSource& source,
                                    const ExecutionPolicy& policy);

// In place: spectrum /= W.
void divide_by_weight(const ShearletSystem& system, SpectrumBuffer& spectrum);

}  // namespace shearvol::detail
