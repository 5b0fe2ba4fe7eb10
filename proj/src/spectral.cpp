#include "spectral.hpp"

#include <algorithm>

namespace shearvol::detail {

namespace {

void ensure(Workspace& ws, const RealFft& fft) {
  if (ws.real.size() != fft.layout().real_size()) ws.real = fft.make_real();
  if (ws.spectrum.size() != fft.layout().spectrum_size()) ws.spectrum = fft.make_spectrum();
}

void gather(const SparseFilter& f, const SpectrumBuffer& c, std::vector<Complex>& compact) {
  compact.resize(f.nonzeros());
  std::size_t t = 0;
  f.for_each([&](std::size_t h, double v) { compact[t++] = c[h] * v; });
}

void scatter_add(const SparseFilter& f, const std::vector<Complex>& compact,
                 SpectrumBuffer& acc) {
  std::size_t t = 0;
  f.for_each([&](std::size_t h, double) { acc[h] += compact[t++]; });
}

void accumulate(const SparseFilter& f, const SpectrumBuffer& c, SpectrumBuffer& acc) {
  f.for_each([&](std::size_t h, double v) { acc[h] += c[h] * v; });
}

}  // namespace

void apply_filter(const SparseFilter& f, const SpectrumBuffer& x, SpectrumBuffer& out) {
  std::fill(out.begin(), out.end(), Complex{});
  f.for_each([&](std::size_t h, double v) { out[h] = x[h] * v; });
}

SpectrumBuffer accumulate_synthesis(const ShearletSystem& system, const RealFft& fft,
                                    const CoefficientSource& source,
                                    const ExecutionPolicy& policy) {
  const std::size_t n = system.size();
  const int threads = static_cast<int>(std::min<std::size_t>(resolve_threads(policy), n));
  SpectrumBuffer acc = fft.make_spectrum();
  std::vector<Workspace> ws(threads);

  if (threads == 1) {
    ensure(ws[0], fft);
    for (std::size_t i = 0; i < n; ++i) {
      source(i, ws[0]);
      fft.forward(ws[0].real, ws[0].spectrum);
      accumulate(system.filter(i), ws[0].spectrum, acc);
    }
    return acc;
  }

  if (policy.deterministic) {
    // Batches of `threads` filters in parallel, committed in filter order.
    for (std::size_t start = 0; start < n; start += threads) {
      const std::size_t batch = std::min<std::size_t>(threads, n - start);
      parallel_for(batch, threads, [&](std::size_t slot, int) {
        Workspace& w = ws[slot];
        ensure(w, fft);
        const std::size_t i = start + slot;
        source(i, w);
        fft.forward(w.real, w.spectrum);
        gather(system.filter(i), w.spectrum, w.compact);
      });
      for (std::size_t slot = 0; slot < batch; ++slot) {
        scatter_add(system.filter(start + slot), ws[slot].compact, acc);
      }
    }
    return acc;
  }

  std::vector<SpectrumBuffer> partial(threads);
  parallel_for(threads, threads, [&](std::size_t w, int) {
    Workspace& s = ws[w];
    ensure(s, fft);
    partial[w] = fft.make_spectrum();
    for (std::size_t i = w; i < n; i += threads) {
      source(i, s);
      fft.forward(s.real, s.spectrum);
      accumulate(system.filter(i), s.spectrum, partial[w]);
    }
  });
  for (const auto& p : partial) {
    for (std::size_t h = 0; h < acc.size(); ++h) acc[h] += p[h];
  }
  return acc;
}

void divide_by_weight(const ShearletSystem& system, SpectrumBuffer& spectrum) {
  const auto w = system.weight();
  for (std::size_t h = 0; h < spectrum.size(); ++h) spectrum[h] /= w[h];
}

}  // namespace shearvol::detail
