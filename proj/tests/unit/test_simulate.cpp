#include <doctest.h>

#include "kpoisson/simulate.hpp"

#include <algorithm>
#include <cmath>

using namespace kpoisson;

TEST_SUITE("simulate") {
  TEST_CASE("homogeneous sampling") {
    Rng rng(1);
    CHECK(sample_homogeneous(Window::unit(2), 0.0, rng).size() == 0);
    double sum = 0.0;
    for (int r = 0; r < 1000; ++r) sum += static_cast<double>(sample_homogeneous(Window::unit(1), 100.0, rng).size());
    CHECK(sum / 1000.0 == doctest::Approx(100.0).epsilon(0.03));
    Rng a(7), b(7);
    const PointPattern pa = sample_homogeneous(Window::parse("0,2,0,3"), 10.0, a);
    const PointPattern pb = sample_homogeneous(Window::parse("0,2,0,3"), 10.0, b);
    CHECK((pa.points().array() == pb.points().array()).all());
  }

  TEST_CASE("thinning matches F(t) = t^2 for a triangular intensity") {
    const IntensityFn tri(Window::unit(1), [](Point x) { return 100.0 * x[0]; }, 100.0);
    Rng rng(3);
    std::vector<double> pts;
    while (pts.size() < 10000) {
      const PointPattern p = sample_inhomogeneous(tri, rng);
      for (Eigen::Index i = 0; i < p.size(); ++i) pts.push_back(p.points()(i, 0));
    }
    std::sort(pts.begin(), pts.end());
    double d = 0.0;
    const double n = static_cast<double>(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double F = pts[i] * pts[i];
      d = std::max({d, std::abs(F - i / n), std::abs((i + 1) / n - F)});
    }
    CHECK(d < 1.628 / std::sqrt(n));
  }

  TEST_CASE("a declared bound that is exceeded is an error") {
    const IntensityFn bad(Window::unit(1), [](Point x) { return 10.0 + 100.0 * x[0]; }, 20.0);
    Rng rng(2);
    CHECK_THROWS_WITH_AS(sample_inhomogeneous(bad, rng), doctest::Contains("exceeds"), Error);
  }

  TEST_CASE("zero intensity gives empty patterns") {
    const IntensityFn zero(Window::unit(2), [](Point) { return 0.0; }, 1.0);
    Rng rng(4);
    CHECK(sample_inhomogeneous(zero, rng).size() == 0);
  }

  TEST_CASE("calibration") {
    const IntensityFn one(Window::unit(1), [](Point) { return 1.0; }, 1.0);
    Rng rng(5);
    CHECK(calibrate_scale(one, 200.0, 1000, rng) == doctest::Approx(200.0));
    CHECK(calibrate_scale(one, 400.0, 1000, rng) == doctest::Approx(400.0));
    const IntensityFn g(Window::parse("-6,6"), [](Point x) { return std::exp(-0.5 * x[0] * x[0]) / std::sqrt(2 * M_PI); }, 1.0);
    CHECK(mc_integral(g, 100000, rng) == doctest::Approx(1.0).epsilon(0.01));
    const IntensityFn zero(Window::unit(1), [](Point) { return 0.0; }, 1.0);
    CHECK_THROWS_AS(calibrate_scale(zero, 1.0, 100, rng), Error);
  }

  TEST_CASE("SE Mercer surface") {
    Rng rng(6);
    const IntensityFn f = intensity_se_mercer_1d(0.5, 64, rng);
    double grid_max = 0.0;
    for (int i = 0; i <= 100000; ++i) {
      const double x[] = {i / 100000.0};
      const double v = f(x);
      CHECK(v >= 0.0);
      grid_max = std::max(grid_max, v);
    }
    CHECK(grid_max <= f.lambda_max());
    Rng again(6);
    const IntensityFn g = intensity_se_mercer_1d(0.5, 64, again);
    const double x[] = {0.3};
    CHECK(f(x) == g(x));
    Rng mc(1);
    CHECK(mc_integral(f, 100000, mc) == doctest::Approx(200.0).epsilon(0.02));
  }

  TEST_CASE("squared mixtures are calibrated and sampled exactly") {
    Rng rng(8);
    const IntensityFn f = intensity_mixture_squared(2, 20, MixtureFamily::Gaussian, {190.0, 210.0}, rng);
    REQUIRE(f.envelope().has_value());
    Rng mc(9);
    const double integral = mc_integral(f, 100000, mc);
    CHECK(integral >= 185.0);
    CHECK(integral <= 215.0);
    double total = 0.0;
    for (int r = 0; r < 100; ++r) total += static_cast<double>(sample_inhomogeneous(f, rng).size());
    CHECK(total / 100.0 == doctest::Approx(integral).epsilon(0.02));
  }

  TEST_CASE("student-t mixtures in high dimension sample without bound violations") {
    Rng rng(10);
    const IntensityFn f = intensity_mixture_squared(15, 20, MixtureFamily::StudentT, {10.0, 1000.0}, rng);
    CHECK_NOTHROW(sample_inhomogeneous(f, rng));
    const auto [lo, hi] = default_count_range(MixtureFamily::StudentT);
    CHECK(lo == 10.0);
    CHECK(hi == 1000.0);
  }
}
