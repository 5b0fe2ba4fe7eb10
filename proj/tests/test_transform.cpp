#include <doctest.h>

#include <cmath>

#include "shearvol/errors.hpp"
#include "shearvol/transform.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace shearvol;

namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double rel_error(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s) / std::max(norm(b), 1e-300);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

VolumeGrid shifted(const VolumeGrid& v, std::size_t sz, std::size_t sx, std::size_t sy) {
  const auto [nz, nx, ny] = v.dims();
  VolumeGrid out(v.dims());
  for (std::size_t y = 0; y < ny; ++y)
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t z = 0; z < nz; ++z) out((z + sz) % nz, (x + sx) % nx, (y + sy) % ny) = v(z, x, y);
  return out;
}

const ShearletSystem& system32() {
  static const ShearletSystem s = build_system(ShearletConfig::volumetric({32, 32, 32}));
  return s;
}

}  // namespace

TEST_CASE("decompose agrees with a direct DFT filter oracle") {
  const Dims3 d{16, 18, 20};
  const auto sys = build_system(ShearletConfig::volumetric(d));
  testgen::Gen g(1);
  const VolumeGrid f = g.volume(d);
  const auto stack = decompose(f, sys);
  const std::vector<std::size_t> dims{d.nz, d.nx, d.ny};
  const std::vector<double> samples(f.values().begin(), f.values().end());
  for (std::size_t i : {std::size_t{0}, std::size_t{5}, std::size_t{40}, sys.size() - 1}) {
    const auto expected = oracle::filter_real(samples, sys.dense_filter(i), dims);
    CAPTURE(i);
    CHECK(max_abs_diff(stack.subbands[i], expected) <= 1e-12 * norm(samples));
  }
}

TEST_CASE("2D decompose agrees with the oracle on one B-scan") {
  const Dims3 d{32, 24, 3};
  const auto sys = build_system(ShearletConfig::bscan(d));
  testgen::Gen g(2);
  const VolumeGrid f = g.volume(d);
  const auto stack = decompose_bscan_2d(f, sys, 1);
  const auto plane = f.bscan(1);
  const std::vector<double> samples(plane.begin(), plane.end());
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const auto expected = oracle::filter_real(samples, sys.dense_filter(i), {32, 24});
    CHECK(max_abs_diff(stack.subbands[i], expected) <= 1e-12 * norm(samples));
  }
}

TEST_CASE("round trip: random, impulse and constant volumes") {
  const auto& sys = system32();
  testgen::for_all(3, 10, [&](testgen::Gen& g) {
    const VolumeGrid f = g.volume({32, 32, 32}, g.uniform(0.1, 100.0));
    CHECK(rel_error(reconstruct(decompose(f, sys), sys).values(), f.values()) <= 1e-6);
  });
  VolumeGrid impulse({32, 32, 32});
  impulse(3, 17, 30) = 1.0;
  CHECK(rel_error(reconstruct(decompose(impulse, sys), sys).values(), impulse.values()) <= 1e-6);

  const VolumeGrid constant({32, 32, 32}, 42.0);
  const auto stack = decompose(constant, sys);
  CHECK(rel_error(reconstruct(stack, sys).values(), constant.values()) <= 1e-6);
  // Constants live entirely in the lowpass band.
  double outside = 0.0;
  for (std::size_t i = 1; i < stack.size(); ++i) outside += norm(stack.subbands[i]) * norm(stack.subbands[i]);
  CHECK(outside <= 1e-9 * std::pow(norm(constant.values()), 2));
  auto lowpass_only = stack;
  for (std::size_t i = 1; i < lowpass_only.size(); ++i) {
    std::fill(lowpass_only.subbands[i].begin(), lowpass_only.subbands[i].end(), 0.0);
  }
  CHECK(rel_error(reconstruct(lowpass_only, sys).values(), constant.values()) <= 1e-6);
}

TEST_CASE("2D round trip on a random 64x64 slice") {
  const Dims3 d{64, 64, 2};
  const auto sys = build_system(ShearletConfig::bscan(d));
  testgen::Gen g(11);
  const VolumeGrid f = g.volume(d);
  const auto back = reconstruct_bscan_2d(decompose_bscan_2d(f, sys, 0), sys);
  CHECK(back.dims() == Dims3{64, 64, 1});
  CHECK(rel_error(back.values(), f.bscan(0)) <= 1e-6);

  const VolumeGrid zero(d);
  for (const auto& s : decompose_bscan_2d(zero, sys, 1).subbands) CHECK(norm(s) == 0.0);

  VolumeGrid neg = f;
  for (double& v : neg.values()) v = -v;
  const auto a = decompose_bscan_2d(f, sys, 1);
  const auto b = decompose_bscan_2d(neg, sys, 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < a.subbands[i].size(); ++k) REQUIRE(b.subbands[i][k] == -a.subbands[i][k]);
  }
}

TEST_CASE("zero volume and zero stack") {
  const auto& sys = system32();
  const auto stack = decompose(VolumeGrid({32, 32, 32}), sys);
  for (const auto& s : stack.subbands) CHECK(norm(s) == 0.0);
  CHECK(norm(reconstruct(stack, sys).values()) == 0.0);
}

TEST_CASE("linearity and shift covariance") {
  const auto& sys = system32();
  testgen::Gen g(21);
  const VolumeGrid f = g.volume({32, 32, 32});
  VolumeGrid f2 = f;
  for (double& v : f2.values()) v *= 2.0;
  const auto a = decompose(f, sys);
  const auto b = decompose(f2, sys);
  const auto c = decompose(shifted(f, 3, 5, 7), sys);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const VolumeGrid ai({32, 32, 32}, a.subbands[i]);
    const auto ai_shift = shifted(ai, 3, 5, 7);
    const double scale = std::max(norm(a.subbands[i]), 1e-300);
    double lin = 0.0;
    for (std::size_t k = 0; k < a.subbands[i].size(); ++k) {
      lin = std::max(lin, std::abs(b.subbands[i][k] - 2.0 * a.subbands[i][k]));
    }
    CHECK(lin <= 1e-12 * scale);
    CHECK(max_abs_diff(c.subbands[i], ai_shift.values()) <= 1e-12 * scale);
  }
}

TEST_CASE("adjoint consistency of decompose and unweighted synthesis") {
  const Dims3 d{16, 16, 16};
  const auto sys = build_system(ShearletConfig::volumetric(d));
  testgen::for_all(3, 31, [&](testgen::Gen& g) {
    const VolumeGrid f = g.volume(d);
    CoefficientStack gstack;
    gstack.dims = {16, 16, 16};
    gstack.indices = sys.indices();
    for (std::size_t i = 0; i < sys.size(); ++i) gstack.subbands.push_back(g.normals(d.size()));
    const auto df = decompose(f, sys);
    long double lhs = 0.0L;
    for (std::size_t i = 0; i < sys.size(); ++i)
      for (std::size_t k = 0; k < d.size(); ++k) lhs += df.subbands[i][k] * gstack.subbands[i][k];
    const auto s = synthesize_unweighted(gstack, sys);
    long double rhs = 0.0L;
    for (std::size_t k = 0; k < d.size(); ++k) rhs += f.values()[k] * s.values()[k];
    CHECK(std::abs(static_cast<double>(lhs - rhs)) <= 1e-9 * std::abs(static_cast<double>(lhs)));
  });
}

TEST_CASE("decompose_subbands returns the chosen filters") {
  const auto& sys = system32();
  testgen::Gen g(41);
  const VolumeGrid f = g.volume({32, 32, 32});
  const auto full = decompose(f, sys);
  const std::vector<std::size_t> which{7, 0, 102};
  const auto part = decompose_subbands(f, sys, which);
  REQUIRE(part.size() == 3);
  for (std::size_t k = 0; k < which.size(); ++k) {
    CHECK(part.indices[k] == sys.index(which[k]));
    CHECK(part.subbands[k] == full.subbands[which[k]]);
  }
  CHECK_THROWS_AS(reconstruct(part, sys), ShapeError);
  const std::vector<std::size_t> bad{103};
  CHECK_THROWS_AS(decompose_subbands(f, sys, bad), BoundsError);
}

TEST_CASE("errors: dims, order, finiteness, slice bounds") {
  const auto& sys = system32();
  CHECK_THROWS_AS(decompose(VolumeGrid({32, 32, 30}), sys), ShapeError);
  VolumeGrid nan({32, 32, 32});
  nan(1, 2, 3) = std::nan("");
  CHECK_THROWS_AS(decompose(nan, sys), ValidationError);

  auto stack = decompose(VolumeGrid({32, 32, 32}), sys);
  std::swap(stack.indices[1], stack.indices[2]);
  CHECK_THROWS_AS(reconstruct(stack, sys), ShapeError);
  stack = decompose(VolumeGrid({32, 32, 32}), sys);
  stack.subbands.pop_back();
  CHECK_THROWS_AS(reconstruct(stack, sys), ShapeError);

  const auto sys2 = build_system(ShearletConfig::bscan({32, 32, 4}));
  CHECK_THROWS_AS(decompose_bscan_2d(VolumeGrid({32, 32, 4}), sys2, 4), BoundsError);
  CHECK_THROWS_AS(decompose_bscan_2d(VolumeGrid({32, 16, 4}), sys2, 0), ShapeError);
  CHECK_THROWS_AS(decompose(VolumeGrid({32, 32, 4}), sys2), ShapeError);
}

TEST_CASE("repeated and multi-threaded calls agree") {
  const auto& sys = system32();
  testgen::Gen g(51);
  const VolumeGrid f = g.volume({32, 32, 32});
  const auto a = decompose(f, sys, {1, false});
  const auto b = decompose(f, sys, {4, false});
  CHECK(a.subbands == b.subbands);
  const auto r1 = reconstruct(a, sys, {1, true});
  const auto r4 = reconstruct(a, sys, {4, true});
  CHECK(std::equal(r1.values().begin(), r1.values().end(), r4.values().begin()));
  const auto r4n = reconstruct(a, sys, {4, false});
  CHECK(max_abs_diff(r4n.values(), r1.values()) <= 1e-12 * norm(r1.values()));
}
