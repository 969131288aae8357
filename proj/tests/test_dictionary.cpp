#include <doctest.h>

#include "oracles.hpp"

#include <tschief/dictionary.hpp>

#include <algorithm>
#include <cmath>

using namespace tschief;

namespace {

  std::vector<std::vector<double>> random_set(Rng& rng, std::size_t count, std::size_t length) {
    std::vector<std::vector<double>> out(count, std::vector<double>(length));
    for (auto& s : out) {
      for (auto& v : s) { v = uniform_real(rng, -3.0, 3.0); }
    }
    return out;
  }

  LabeledDataset as_dataset(const std::vector<std::vector<double>>& raw) {
    std::vector<TimeSeries> series;
    std::vector<Label> labels;
    for (const auto& s : raw) {
      series.emplace_back(s);
      labels.push_back(static_cast<Label>(labels.size() % 2));
    }
    return LabeledDataset(std::move(series), std::move(labels), 2);
  }

  oracle::Histogram as_map(HistogramView h) {
    oracle::Histogram m;
    for (const auto& e : h) { m[e.word] = e.count; }
    return m;
  }

} // namespace

TEST_CASE("training histograms match the naive BOSS pipeline") {
  Rng rng = derive_stream(21, 0);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t length = uniform_between(rng, 12, 40);
    const auto raw = random_set(rng, 6, length);
    const auto params = sample_boss_params(rng, length);
    CAPTURE(params.window);
    CAPTURE(params.word_length);
    CAPTURE(params.norm);
    const auto fitted = BossTransform::fit(as_dataset(raw), params);
    const auto expected = oracle::boss_histograms(raw, params, raw);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      CHECK(as_map(fitted.histogram(i)) == expected[i]);
      CHECK(as_map(fitted.transform(raw[i]).view()) == expected[i]);
    }
  }
}

TEST_CASE("sliding DFT agrees with the direct DFT on long windows") {
  Rng rng = derive_stream(22, 0);
  std::vector<double> x(300);
  for (auto& v : x) { v = uniform_real(rng, -1.0, 1.0); }
  for (bool norm : {false, true}) {
    const BossParams p{120, 16, 4, norm};
    const auto fast = sliding_coefficients(x, p);
    const std::size_t windows = x.size() - p.window + 1;
    REQUIRE(fast.size() == windows * p.word_length);
    for (std::size_t s = 0; s < windows; s += 7) {
      const auto win = std::span<const double>(x).subspan(s, p.window);
      double mean = 0.0;
      for (double v : win) { mean += v; }
      mean /= static_cast<double>(p.window);
      double var = 0.0;
      for (double v : win) { var += (v - mean) * (v - mean); }
      const double sd = std::sqrt(var / static_cast<double>(p.window));
      const auto direct = sfa_coefficients(win, p.word_length, norm);
      for (std::size_t k = 0; k < p.word_length; ++k) {
        CHECK(fast[s * p.word_length + k] == doctest::Approx(direct[k] / sd).epsilon(1e-9).scale(1.0));
      }
    }
  }
}

TEST_CASE("MCB breakpoints are empirical quantiles and ties go to the lower symbol") {
  const std::vector<std::vector<double>> columns{{8, 7, 6, 5, 4, 3, 2, 1}};
  const auto mcb = fit_mcb(columns, 4);
  REQUIRE(mcb.positions() == 1);
  CHECK(mcb.boundaries[0] == std::vector<double>{2, 4, 6});
  CHECK(mcb.symbol(0, 2.0) == 0);
  CHECK(mcb.symbol(0, 2.5) == 1);
  CHECK(mcb.symbol(0, 6.0) == 2);
  CHECK(mcb.symbol(0, 9.0) == 3);
  const std::vector<std::vector<double>> empty{{}};
  CHECK_THROWS_AS(fit_mcb(empty, 4), Error);
}

TEST_CASE("word ids put the first symbol in the most significant digit") {
  MCBTable mcb{{{0.0, 1.0, 2.0}, {0.0, 1.0, 2.0}}};
  const std::vector<double> coefs{2.5, 0.5};
  CHECK(quantize_word(coefs, mcb, 4) == 3 * 4 + 1);
}

TEST_CASE("numerosity reduction collapses runs only") {
  // one coefficient pair per window: constant stretches give repeated words
  const BossParams p{2, 2, 4, false};
  MCBTable mcb{{{-0.5, 0.5, 1.5}, {-0.5, 0.0, 0.5}}};
  const std::vector<double> x{1.0, 1.0, 1.0, 5.0, 5.0, 5.0, 1.0, 1.0};
  const auto words = series_words(x, p, mcb);
  for (std::size_t i = 1; i < words.size(); ++i) { CHECK(words[i] != words[i - 1]); }
  const auto h = transform_series(x, p, mcb);
  CHECK(h.total() == words.size());
}

TEST_CASE("boss distance sums over the first histogram's words only") {
  const auto a = WordHistogram::from_entries({{1, 2}, {5, 1}});
  const auto b = WordHistogram::from_entries({{1, 1}, {7, 4}});
  CHECK(boss_dist(a.view(), b.view()) == 2.0);   // (2-1)^2 + (1-0)^2
  CHECK(boss_dist(b.view(), a.view()) == 17.0);  // (1-2)^2 + (4-0)^2
  CHECK(boss_dist(b.view(), a.view(), 16.0) == INFINITY);
  CHECK(boss_dist(b.view(), a.view(), 17.0) == 17.0);
  CHECK_THROWS_AS(WordHistogram::from_entries({{5, 1}, {1, 1}}), Error);
  CHECK_THROWS_AS(WordHistogram::from_entries({{1, 0}}), Error);
  CHECK(WordHistogram::from_words({3, 1, 3}) == WordHistogram::from_entries({{1, 1}, {3, 2}}));
}

TEST_CASE("sampled parameters are always legal") {
  Rng rng = derive_stream(23, 0);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t length = uniform_between(rng, 10, 80);
    const auto p = sample_boss_params(rng, length);
    CHECK(p.window >= boss_min_window);
    CHECK(p.window <= length);
    CHECK(p.word_length <= usable_coefficients(p.window, p.norm));
    CHECK(p.alphabet == boss_alphabet_size);
    CHECK_NOTHROW(validate(p, length));
  }
  CHECK(usable_coefficients(10, false) == 12);
  CHECK(usable_coefficients(10, true) == 10);
}

TEST_CASE("pool construction reports bad inputs and is thread-count independent") {
  Rng rng = derive_stream(24, 0);
  const auto data = as_dataset(random_set(rng, 8, 30));
  Rng r1 = derive_stream(5, 5);
  Rng r2 = derive_stream(5, 5);
  const auto serial = precompute_transforms(data, 6, r1, 1);
  const auto threaded = precompute_transforms(data, 6, r2, 4);
  REQUIRE(serial.size() == 6);
  for (std::size_t t = 0; t < 6; ++t) {
    CHECK(serial[t].params() == threaded[t].params());
    CHECK(serial[t].mcb() == threaded[t].mcb());
    for (std::size_t i = 0; i < data.size(); ++i) {
      CHECK(std::ranges::equal(serial[t].histogram(i), threaded[t].histogram(i)));
    }
  }
  CHECK_THROWS_AS(precompute_transforms(data, 0, r1), ConfigError);
  const auto short_data = as_dataset(random_set(rng, 4, 8));
  CHECK_THROWS_WITH_AS(precompute_transforms(short_data, 3, r1), "series too short for BOSS", Error);
  CHECK_THROWS_AS(BossTransform(BossParams{10, 6, 4, false}, MCBTable{}), Error);
  CHECK_THROWS_AS(static_cast<void>(serial[0].histogram(data.size())), Error);
}
