#include "fft.hpp"

#include <fftw3.h>

#include <functional>
#include <mutex>
#include <new>
#include <numeric>

#include "shearvol/errors.hpp"

namespace shearvol::detail {

namespace {

// The FFTW planner is not reentrant; execution of existing plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

void* fft_alloc(std::size_t bytes) {
  void* p = fftw_malloc(bytes == 0 ? 1 : bytes);
  if (!p) throw std::bad_alloc();
  return p;
}

void fft_free(void* p) noexcept { fftw_free(p); }

}  // namespace shearvol::detail

namespace shearvol {

SpectrumLayout::SpectrumLayout(std::span<const std::size_t> d) : dims(d.begin(), d.end()) {
  half0 = dims.empty() ? 0 : dims[0] / 2 + 1;
}

std::size_t SpectrumLayout::real_size() const {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

std::size_t SpectrumLayout::spectrum_size() const {
  if (dims.empty()) return 0;
  return real_size() / dims[0] * half0;
}

}  // namespace shearvol

namespace shearvol::detail {

struct RealFft::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

RealFft::RealFft(std::span<const std::size_t> dims)
    : layout_(dims), plans_(std::make_unique<Plans>()) {
  if (dims.size() < 1 || dims.size() > 3) throw ShapeError("FFT rank must be 1..3");
  // FFTW expects row-major extents with the contiguous axis last.
  int n[3];
  const int rank = static_cast<int>(dims.size());
  for (int a = 0; a < rank; ++a) n[a] = static_cast<int>(dims[rank - 1 - a]);

  RealBuffer real = make_real();
  SpectrumBuffer spec = make_spectrum();
  auto* cplx = reinterpret_cast<fftw_complex*>(spec.data());

  // FFTW_ESTIMATE keeps plan selection, and therefore results, reproducible
  // from run to run.
  std::lock_guard lock(planner_mutex());
  plans_->r2c = fftw_plan_dft_r2c(rank, n, real.data(), cplx, FFTW_ESTIMATE);
  plans_->c2r = fftw_plan_dft_c2r(rank, n, cplx, real.data(), FFTW_ESTIMATE);
  if (!plans_->r2c || !plans_->c2r) throw Error("FFTW planning failed");
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  if (plans_->r2c) fftw_destroy_plan(plans_->r2c);
  if (plans_->c2r) fftw_destroy_plan(plans_->c2r);
}

void RealFft::forward(const RealBuffer& in, SpectrumBuffer& out) const {
  // r2c leaves its input untouched unless FFTW_DESTROY_INPUT was requested.
  fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft::inverse(SpectrumBuffer& in, RealBuffer& out) const {
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(in.data()), out.data());
  const double scale = 1.0 / static_cast<double>(layout_.real_size());
  for (double& v : out) v *= scale;
}

}  // namespace shearvol::detail
