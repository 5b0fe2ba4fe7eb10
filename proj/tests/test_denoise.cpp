#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "shearvol/denoise.hpp"
#include "shearvol/errors.hpp"
#include "shearvol/metrics.hpp"
#include "shearvol/phantom.hpp"
#include "shearvol/transform.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace shearvol;

namespace {

double rel_error(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

DenoiseParams params_2d(double tl = 2.5) {
  DenoiseParams p;
  p.mode = DenoiseMode::kBscan2D;
  p.tl = tl;
  return p;
}

DenoiseParams with_tl(double tl) {
  DenoiseParams p;
  p.tl = tl;
  return p;
}

const ShearletSystem& system32() {
  static const ShearletSystem s = build_system(ShearletConfig::volumetric({32, 32, 32}));
  return s;
}

}  // namespace

TEST_CASE("threshold: hand example with sigma_jl = 900") {
  // {-3, 2, 2.6} padded with +-b so the population std is 900.
  std::vector<double> c{-3.0, 2.0, 2.6};
  const std::size_t pairs = 500;
  const double n = 3.0 + 2.0 * pairs;
  const double mean = 1.6 / n;
  const double base_ss = 9.0 + 4.0 + 6.76 - n * mean * mean;
  const double b = std::sqrt((900.0 * 900.0 * n - base_ss) / (2.0 * pairs));
  for (std::size_t k = 0; k < pairs; ++k) {
    c.push_back(b);
    c.push_back(-b);
  }
  const auto st = threshold_subband(c, DenoiseParams{});
  CHECK(st.sigma == doctest::Approx(900.0).epsilon(1e-12));
  CHECK(st.threshold == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(c[0] == -3.0);
  CHECK(c[1] == 0.0);
  CHECK(c[2] == 2.6);

  std::vector<double> direct{-3.0, 2.0, 2.6};
  CHECK(apply_threshold(direct, 2.5) == 2);
  CHECK(direct == std::vector<double>{-3.0, 0.0, 2.6});
  std::vector<double> edge{2.5, -2.5};
  CHECK(apply_threshold(edge, 2.5) == 0);
}

TEST_CASE("threshold: tl = 0 keeps the subband, constants are zeroed") {
  testgen::Gen g(3);
  auto c = g.normals(1000, 5.0);
  c[10] = 0.0;
  const auto before = c;
  const auto st = threshold_subband(c, with_tl(0.0));
  CHECK(c == before);
  CHECK(st.threshold == 0.0);
  CHECK(st.kept_fraction == doctest::Approx(999.0 / 1000.0));

  std::vector<double> k(64, 7.25);
  const auto sk = threshold_subband(k, DenoiseParams{});
  CHECK(sk.sigma == 0.0);
  CHECK(std::isinf(sk.threshold));
  CHECK(sk.kept_fraction == 0.0);
  for (double v : k) CHECK(v == 0.0);

  std::vector<double> bad{1.0, std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(threshold_subband(bad, DenoiseParams{}), ValidationError);
}

TEST_CASE("threshold: agrees with the direct oracle on random subbands") {
  testgen::for_all(100, 1000, [](testgen::Gen& g) {
    const std::size_t n = static_cast<std::size_t>(g.integer(1, 3000));
    auto c = g.normals(n, g.uniform(0.01, 200.0));
    for (double& v : c) v += g.uniform(-5.0, 5.0);
    const double tl = g.pick(std::vector<double>{0.0, 0.5, 1.5, 2.5, 10.0});
    const double sigma = g.uniform(1.0, 60.0);
    DenoiseParams p;
    p.tl = tl;
    p.sigma = sigma;
    const auto expect = oracle::hard_threshold(c, tl, sigma);
    auto got = c;
    const auto st = threshold_subband(got, p);
    CAPTURE(g.seed());
    CHECK(st.sigma == doctest::Approx(expect.sigma_jl).epsilon(1e-12));
    CHECK(got == expect.values);
  });
}

TEST_CASE("threshold: idempotent at fixed T, monotone in TL") {
  testgen::for_all(30, 2000, [](testgen::Gen& g) {
    auto c = g.normals(500, g.uniform(1.0, 50.0));
    auto first = c;
    const auto st = threshold_subband(first, with_tl(g.uniform(0.1, 3.0)));
    auto again = first;
    apply_threshold(again, st.threshold);
    CHECK(again == first);
    CHECK(st.kept_fraction >= 0.0);
    CHECK(st.kept_fraction <= 1.0);
    CHECK(st.threshold > 0.0);

    const double ta = g.uniform(0.0, 2.0), tb = ta + g.uniform(0.0, 2.0);
    auto a = c, b = c;
    threshold_subband(a, with_tl(ta));
    threshold_subband(b, with_tl(tb));
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (b[i] != 0.0) CHECK(a[i] != 0.0);
    }
  });
}

TEST_CASE("params validation") {
  DenoiseParams p;
  p.sigma = 0.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = DenoiseParams{};
  p.tl = -1.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  CHECK(DenoiseParams::octa().tl == 1.5);
  CHECK(DenoiseParams::oct().tl == 2.5);
  CHECK(DenoiseParams{}.sigma == 30.0);
  CHECK_THROWS_AS(denoise_volume(VolumeGrid({32, 32, 32}), system32(), params_2d()), ParameterError);
  CHECK_THROWS_AS(denoise_volume(VolumeGrid({32, 32, 16}), system32(), DenoiseParams{}), ShapeError);
}

TEST_CASE("denoise: tl = 0 is the identity in 3D and 2D") {
  testgen::for_all(2, 3000, [](testgen::Gen& g) {
    const VolumeGrid f = g.volume_in({32, 32, 32}, 0.0, 255.0);
    const auto r3 = denoise_volume(f, system32(), with_tl(0.0));
    CHECK(rel_error(r3.volume.values(), f.values()) <= 1e-6);
    const auto sys2 = build_system(ShearletConfig::bscan(f.dims()));
    const auto r2 = denoise_volume_2d(f, sys2, params_2d(0.0));
    CHECK(rel_error(r2.volume.values(), f.values()) <= 1e-6);
    CHECK(r2.stats.size() == sys2.size() * 32);
  });
}

TEST_CASE("denoise: zero volume stays zero and range is copied") {
  VolumeGrid zero({32, 32, 32});
  zero.set_range({0.0, 100.0});
  const auto r = denoise_volume(zero, system32(), DenoiseParams{});
  for (double v : r.volume.values()) CHECK(v == 0.0);
  CHECK(r.volume.range() == IntensityRange{0.0, 100.0});
}

TEST_CASE("denoise: output is clamped to the declared range") {
  testgen::Gen g(5);
  VolumeGrid f = g.volume({32, 32, 32}, 80.0);
  f.set_range({-10.0, 10.0});
  const auto r = denoise_volume(f, system32(), with_tl(0.5));
  for (double v : r.volume.values()) {
    REQUIRE(v >= -10.0);
    REQUIRE(v <= 10.0);
  }
}

TEST_CASE("denoise: streamed equals materialized") {
  testgen::for_all(2, 4000, [](testgen::Gen& g) {
    const VolumeGrid f = g.volume_in({32, 32, 32}, 0.0, 255.0);
    const auto p = with_tl(g.uniform(0.2, 3.0));
    const auto s = denoise_volume(f, system32(), p);
    const auto m = denoise_materialized(f, system32(), p);
    CHECK(rel_error(s.volume.values(), m.volume.values()) <= 1e-9);
    REQUIRE(s.stats.size() == m.stats.size());
    for (std::size_t i = 0; i < s.stats.size(); ++i) {
      CHECK(s.stats[i].threshold == doctest::Approx(m.stats[i].threshold).epsilon(1e-9));
    }
  });
  const Dims3 d{32, 32, 3};
  testgen::Gen g(4100);
  const VolumeGrid f = g.volume_in(d, 0.0, 255.0);
  const auto sys2 = build_system(ShearletConfig::bscan(d));
  const auto s = denoise_volume_2d(f, sys2, params_2d(1.0));
  const auto m = denoise_materialized(f, sys2, params_2d(1.0));
  CHECK(rel_error(s.volume.values(), m.volume.values()) <= 1e-9);
}

TEST_CASE("denoise: sign symmetry without clamping") {
  testgen::Gen g(6);
  const VolumeGrid f = g.volume({32, 32, 32}, 40.0);
  VolumeGrid neg = f;
  for (double& v : neg.values()) v = -v;
  DenoiseParams p = with_tl(1.0);
  p.clamp = false;
  const auto a = denoise_volume(f, system32(), p);
  const auto b = denoise_volume(neg, system32(), p);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    worst = std::max(worst, std::abs(a.volume.values()[i] + b.volume.values()[i]));
    scale = std::max(scale, std::abs(a.volume.values()[i]));
  }
  CHECK(worst <= 1e-12 * std::max(scale, 1.0));
}

TEST_CASE("denoise: lowpass exemption") {
  testgen::Gen g(7);
  const VolumeGrid f = g.volume_in({32, 32, 32}, 0.0, 255.0);
  DenoiseParams p;
  p.threshold_lowpass = false;
  const auto r = denoise_volume(f, system32(), p);
  CHECK(r.stats[0].threshold == 0.0);
  CHECK(r.stats[0].kept_fraction == 1.0);
  CHECK(r.stats[1].threshold > 0.0);

  auto config = ShearletConfig::volumetric({32, 32, 32});
  config.threshold_lowpass = false;
  const auto r2 = denoise_volume(f, config, DenoiseParams{});
  CHECK(r2.stats[0].threshold == 0.0);
  CHECK(std::ranges::equal(r2.volume.values(), r.volume.values()));
}

TEST_CASE("denoise: stats integrity") {
  testgen::Gen g(8);
  const VolumeGrid f = g.volume_in({32, 32, 32}, 0.0, 255.0);
  const auto r = denoise_volume(f, system32(), DenoiseParams::octa());
  REQUIRE(r.stats.size() == system32().size());
  for (std::size_t i = 0; i < r.stats.size(); ++i) {
    const auto& s = r.stats[i];
    CHECK(s.subband == i);
    CHECK(s.index == system32().index(i));
    CHECK(s.slice == -1);
    CHECK(s.kept_fraction >= 0.0);
    CHECK(s.kept_fraction <= 1.0);
    if (s.sigma >= 1e-9) CHECK(s.threshold == doctest::Approx(1.5 * 900.0 / s.sigma));
  }
  const std::string table = format_stats_table(r.stats);
  CHECK(table.find("lowpass") != std::string::npos);
  CHECK(table.find("j1.p2.k2,2") != std::string::npos);
}

TEST_CASE("denoise: thread count does not change the result") {
  testgen::Gen g(9);
  const VolumeGrid f = g.volume_in({32, 32, 32}, 0.0, 255.0);
  const auto p = with_tl(0.3);
  const auto one = denoise_volume(f, system32(), p, {1, true});
  const auto four = denoise_volume(f, system32(), p, {4, true});
  CHECK(std::ranges::equal(one.volume.values(), four.volume.values()));
  const auto loose = denoise_volume(f, system32(), p, {3, false});
  CHECK(rel_error(loose.volume.values(), one.volume.values()) <= 1e-12);
}

TEST_CASE("denoise 2D: a single slice matches the slice transform") {
  const Dims3 d{32, 48, 1};
  testgen::Gen g(10);
  const VolumeGrid f = g.volume_in(d, 0.0, 255.0);
  const auto sys2 = build_system(ShearletConfig::bscan(d));
  const auto r = denoise_volume_2d(f, sys2, params_2d(1.0));

  auto stack = decompose_bscan_2d(f, sys2, 0);
  for (auto& sb : stack.subbands) {
    oracle::ThresholdResult t = oracle::hard_threshold(sb, 1.0, 30.0);
    sb = t.values;
  }
  auto expect = reconstruct_bscan_2d(stack, sys2);
  for (double& v : expect.values()) v = std::clamp(v, 0.0, 255.0);
  CHECK(rel_error(r.volume.values(), expect.values()) <= 1e-9);
  for (const auto& s : r.stats) CHECK(s.slice == 0);
}

TEST_CASE("denoise: layered speckle phantom improves PSNR") {
  const auto pair = gen_oct_phantom(OctPhantomSpec{}, 42);
  const auto sys = build_system(ShearletConfig::volumetric(pair.noisy.dims()));
  const auto r = denoise_volume(pair.noisy, sys, DenoiseParams::oct());
  const double before = psnr(pair.noisy, pair.clean).db;
  const double after = psnr(r.volume, pair.clean).db;
  MESSAGE("psnr noisy " << before << " dB, denoised " << after << " dB");
  CHECK(after > before);
  CHECK(after - before >= 3.0);
}

TEST_CASE("denoise: 3D beats 2D on the vascular phantom") {
  const auto pair = gen_octa_phantom(OctaPhantomSpec{}, 7);
  const auto d = pair.noisy.dims();
  const auto r3 = denoise_volume(pair.noisy, build_system(ShearletConfig::volumetric(d)), DenoiseParams::octa());
  auto p2 = DenoiseParams::octa();
  p2.mode = DenoiseMode::kBscan2D;
  const auto r2 = denoise_volume_2d(pair.noisy, build_system(ShearletConfig::bscan(d)), p2);
  const double a = psnr(r3.volume, pair.clean).db;
  const double b = psnr(r2.volume, pair.clean).db;
  MESSAGE("vascular psnr 3d " << a << " dB, 2d " << b << " dB");
  CHECK(a >= b);
}
