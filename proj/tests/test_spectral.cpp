#include <doctest.h>

#include "oracles.hpp"

#include <tschief/spectral.hpp>

#include <cmath>

using namespace tschief;

TEST_CASE("ACF of a short series by hand") {
  // centred: -1.5, -0.5, 0.5, 1.5; denominator 5
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const auto r = acf(x, 2);
  CHECK(r[0] == doctest::Approx((0.75 - 0.25 + 0.75) / 5.0));
  CHECK(r[1] == doctest::Approx((-0.75 - 0.75) / 5.0));
  CHECK(acf(std::vector<double>{2.0, 2.0, 2.0}, 2) == std::vector<double>{0.0, 0.0});
  CHECK_THROWS_AS(acf(x, 4), Error);
}

TEST_CASE("PACF at lag one equals ACF at lag one") {
  Rng rng = derive_stream(31, 0);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> x(40);
    for (auto& v : x) { v = uniform_real(rng, -1.0, 1.0); }
    const auto r = acf(x, 10);
    CHECK(pacf(r)[0] == r[0]);
  }
}

TEST_CASE("AR(1) coefficient is recovered") {
  Rng rng = derive_stream(32, 0);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (double phi : {-0.6, 0.3, 0.8}) {
    std::vector<double> x(512);
    double prev = 0.0;
    for (auto& v : x) {
      v = phi * prev + noise(rng);
      prev = v;
    }
    CHECK(std::abs(ar_coefficients(x, 1)[0] - phi) < 0.1);
    CHECK(std::abs(ar_coefficients(x, lag_cap(x.size()))[0] - phi) < 0.15);
  }
}

TEST_CASE("power spectrum satisfies Parseval") {
  Rng rng = derive_stream(33, 0);
  for (int i = 0; i < 30; ++i) {
    const std::size_t m = uniform_between(rng, 16, 70);
    std::vector<double> x(m);
    for (auto& v : x) { v = uniform_real(rng, -2.0, 2.0); }
    const auto ps = power_spectrum(x);
    REQUIRE(ps.size() == m / 2);
    double half = 0.0;
    for (std::size_t k = 1; k <= m / 2; ++k) { half += (2 * k == m ? 1.0 : 2.0) * ps[k - 1]; }
    double mean = 0.0;
    for (double v : x) { mean += v; }
    mean /= static_cast<double>(m);
    double centred = 0.0;
    for (double v : x) { centred += (v - mean) * (v - mean); }
    CHECK(half == doctest::Approx(static_cast<double>(m) * centred).epsilon(1e-9));
    CHECK(half == doctest::Approx(oracle::centred_dft_energy(x)).epsilon(1e-9));
  }
}

TEST_CASE("transform lengths and interval bounds") {
  CHECK(lag_cap(16) == 4);
  CHECK(lag_cap(1000) == 100);
  CHECK(transformed_length(16, TransformKind::Acf) == 4);
  CHECK(transformed_length(16, TransformKind::Ps) == 8);
  Rng rng = derive_stream(34, 0);
  std::vector<double> x(50, 1.0);
  x[3] = 2.0;
  for (int i = 0; i < 200; ++i) {
    const auto iv = sample_interval(rng, 50);
    CHECK(iv.length >= min_interval_length);
    CHECK(iv.start + iv.length <= 50);
    for (auto kind : all_transform_kinds) {
      CHECK(transform_interval(x, iv, kind).size() == transformed_length(iv.length, kind));
    }
  }
  CHECK_THROWS_WITH_AS(sample_interval(rng, 15), "series shorter than m_min", Error);
  CHECK_THROWS_AS(transform_interval(x, Interval{40, 16}, TransformKind::Acf), Error);
}

TEST_CASE("constant subseries yield zero ACF, PACF and AR") {
  const std::vector<double> flat(32, 3.0);
  const Interval iv{0, 32};
  for (auto kind : {TransformKind::Acf, TransformKind::Pacf, TransformKind::Ar}) {
    for (double v : transform_interval(flat, iv, kind)) { CHECK(v == 0.0); }
  }
}
