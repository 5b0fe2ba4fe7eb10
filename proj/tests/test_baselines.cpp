#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "shearvol/baselines.hpp"
#include "shearvol/errors.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace shearvol;

namespace {

// Direct evaluation of the shrinking centered mean, one sample at a time.
VolumeGrid moving_mean_oracle(const VolumeGrid& v, int window) {
  const auto [nz, nx, ny] = v.dims();
  VolumeGrid out(v.dims());
  const long lo = -(window / 2) + (window % 2 == 0 ? 1 : 0);
  const long hi = window / 2;
  for (std::size_t y = 0; y < ny; ++y)
    for (std::size_t x = 0; x < nx; ++x)
      for (long z = 0; z < static_cast<long>(nz); ++z) {
        double s = 0.0;
        int n = 0;
        for (long o = lo; o <= hi; ++o) {
          const long t = z + o;
          if (t < 0 || t >= static_cast<long>(nz)) continue;
          s += v(static_cast<std::size_t>(t), x, y);
          ++n;
        }
        out(static_cast<std::size_t>(z), x, y) = s / n;
      }
  return out;
}

}  // namespace

TEST_CASE("median subtraction: hand examples") {
  const auto flat = median_subtract(VolumeGrid({1, 5, 1}, 5.0));
  for (double x : flat.values()) CHECK(x == 0.0);

  const std::vector<double> row{0, 0, 0, 0, 10};
  const VolumeGrid r({1, 5, 1}, row);
  CHECK(std::ranges::equal(median_subtract(r).values(), row));

  const auto zero = median_subtract(VolumeGrid({8, 6, 4}));
  for (double x : zero.values()) CHECK(x == 0.0);
}

TEST_CASE("median subtraction agrees with a per-row oracle") {
  testgen::for_all(20, 100, [](testgen::Gen& g) {
    const Dims3 d{static_cast<std::size_t>(g.integer(1, 12)), static_cast<std::size_t>(g.integer(1, 11)),
                  static_cast<std::size_t>(g.integer(1, 5))};
    const VolumeGrid v = g.volume_in(d, 0.0, 255.0);
    const auto out = median_subtract(v);
    REQUIRE(out.dims() == d);
    for (std::size_t y = 0; y < d.ny; ++y)
      for (std::size_t z = 0; z < d.nz; ++z) {
        std::vector<double> row;
        for (std::size_t x = 0; x < d.nx; ++x) row.push_back(v(z, x, y));
        const double m = oracle::median(row);
        for (std::size_t x = 0; x < d.nx; ++x) {
          CHECK(out(z, x, y) == std::max(0.0, v(z, x, y) - m));
          CHECK(out(z, x, y) <= v(z, x, y));
        }
      }
  });
}

TEST_CASE("pixel averaging: hand examples") {
  const auto c = pixel_average_axial(VolumeGrid({10, 3, 2}, 42.0));
  for (double x : c.values()) CHECK(x == doctest::Approx(42.0).epsilon(1e-15));

  VolumeGrid impulse({20, 1, 1});
  impulse(10, 0, 0) = 1.0;
  const auto out = pixel_average_axial(impulse, 6);
  int nonzero = 0;
  for (std::size_t z = 0; z < 20; ++z) {
    if (out(z, 0, 0) != 0.0) {
      ++nonzero;
      CHECK(out(z, 0, 0) == doctest::Approx(1.0 / 6.0));
    }
  }
  CHECK(nonzero == 6);
  // Even windows put the extra sample on the trailing side.
  CHECK(out(7, 0, 0) == doctest::Approx(1.0 / 6.0));
  CHECK(out(12, 0, 0) == doctest::Approx(1.0 / 6.0));
  CHECK(out(6, 0, 0) == 0.0);

  testgen::Gen g(3);
  const VolumeGrid v = g.volume({9, 4, 3});
  CHECK(std::ranges::equal(pixel_average_axial(v, 1).values(), v.values()));
  CHECK_THROWS_AS(pixel_average_axial(v, 0), ParameterError);
  CHECK_THROWS_AS(pixel_average_axial(v, -3), ParameterError);
}

TEST_CASE("pixel averaging agrees with the direct sum and commutes with offsets") {
  testgen::for_all(20, 200, [](testgen::Gen& g) {
    const Dims3 d{static_cast<std::size_t>(g.integer(1, 20)), static_cast<std::size_t>(g.integer(1, 4)),
                  static_cast<std::size_t>(g.integer(1, 3))};
    const int window = static_cast<int>(g.integer(1, 9));
    const VolumeGrid v = g.volume_in(d, 0.0, 255.0);
    const auto got = pixel_average_axial(v, window);
    const auto expect = moving_mean_oracle(v, window);
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(got.values()[i] == doctest::Approx(expect.values()[i]).epsilon(1e-12));
      CHECK(got.values()[i] >= 0.0);
    }
    const double k = g.uniform(-50.0, 50.0);
    VolumeGrid shifted = v;
    for (double& x : shifted.values()) x += k;
    const auto gs = pixel_average_axial(shifted, window);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(gs.values()[i] == doctest::Approx(got.values()[i] + k).epsilon(1e-12));
  });
}

TEST_CASE("baselines keep geometry") {
  VolumeGrid v({4, 4, 4}, 1.0);
  v.set_pitch({0.01, 0.02, 0.03});
  v.set_range({0.0, 10.0});
  for (const auto& out : {median_subtract(v), pixel_average_axial(v)}) {
    CHECK(out.dims() == v.dims());
    CHECK(out.pitch() == v.pitch());
    CHECK(out.range() == v.range());
  }
}
