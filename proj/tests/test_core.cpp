#include <doctest.h>

#include <tschief/core.hpp>
#include <tschief/parallel.hpp>
#include <tschief/rng.hpp>

#include <atomic>
#include <cmath>
#include <numeric>

using namespace tschief;

namespace {

  LabeledDataset small_dataset() {
    std::vector<TimeSeries> s{TimeSeries({0.0, 1.0}), TimeSeries({1.0, 2.0}), TimeSeries({2.0, 3.0}),
                              TimeSeries({3.0, 4.0})};
    return LabeledDataset(std::move(s), {0, 1, 1, 2});
  }

} // namespace

TEST_CASE("time series rejects short or non-finite input") {
  CHECK_THROWS_AS(TimeSeries({1.0}), Error);
  CHECK_THROWS_AS(TimeSeries({1.0, std::nan("")}), Error);
  CHECK_THROWS_AS(TimeSeries({1.0, INFINITY}), Error);
  const TimeSeries ts({1.0, 2.0, 3.0});
  CHECK(ts.length() == 3);
  CHECK(ts[1] == 2.0);
}

TEST_CASE("labeled dataset validates shape and labels") {
  CHECK_THROWS_AS(LabeledDataset({}, {}, 2), Error);
  CHECK_THROWS_AS(LabeledDataset({TimeSeries({0.0, 1.0})}, {0, 1}, 2), Error);
  CHECK_THROWS_AS(LabeledDataset({TimeSeries({0.0, 1.0}), TimeSeries({0.0, 1.0, 2.0})}, {0, 1}, 2), Error);
  CHECK_THROWS_AS(LabeledDataset({TimeSeries({0.0, 1.0})}, {3}, 2), Error);

  const auto d = small_dataset();
  CHECK(d.size() == 4);
  CHECK(d.class_count() == 3);
  CHECK(d.series_length() == 2);
  CHECK(d.class_counts() == std::vector<std::size_t>{1, 2, 1});
  CHECK_NOTHROW(d.require_all_classes());
  const LabeledDataset missing({TimeSeries({0.0, 1.0})}, {0}, 2);
  CHECK_THROWS_WITH_AS(missing.require_all_classes(), doctest::Contains("class 1"), Error);

  const std::vector<std::size_t> pick{3, 1};
  const auto sub = d.subset(pick);
  CHECK(sub.size() == 2);
  CHECK(sub.class_count() == 3);
  CHECK(sub.label(0) == 2);
  CHECK(sub.series(1) == d.series(1));
}

TEST_CASE("class distribution majority breaks ties by lowest index") {
  ClassDistribution dist(3);
  dist.add(2, 2);
  dist.add(1, 2);
  CHECK(dist.majority() == 1);
  CHECK(dist.total() == 4);
  CHECK(dist.present_classes() == 2);
}

TEST_CASE("gini and weighted gini") {
  ClassDistribution pure(2);
  pure.add(0, 5);
  CHECK(gini(pure) == 0.0);
  ClassDistribution half(2);
  half.add(0, 2);
  half.add(1, 2);
  CHECK(gini(half) == doctest::Approx(0.5));
  CHECK_THROWS_WITH_AS(gini(ClassDistribution(2)), "empty partition", Error);

  // {A} | {B, A}: 1/3 * 0 + 2/3 * 0.5
  ClassDistribution left(2);
  left.add(0);
  ClassDistribution right(2);
  right.add(0);
  right.add(1);
  const std::vector parts{left, right, ClassDistribution(2)};
  CHECK(weighted_gini(3, parts) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("znormalize gives zero mean and unit population stddev") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0, 10.0};
  const auto z = znormalize(x);
  const double mean = std::accumulate(z.begin(), z.end(), 0.0) / 5.0;
  double var = 0.0;
  for (double v : z) { var += (v - mean) * (v - mean); }
  CHECK(mean == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(var / 5.0 == doctest::Approx(1.0));
  const std::vector<double> flat{3.0, 3.0, 3.0};
  CHECK(znormalize(flat) == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("dataset stats pool every value") {
  const auto stats = dataset_stats(small_dataset());
  CHECK(stats.length == 2);
  // values 0,1,1,2,2,3,3,4: mean 2, population variance 1.5
  CHECK(stats.stddev == doctest::Approx(std::sqrt(1.5)));
}

TEST_CASE("derived streams are reproducible and distinct") {
  Rng a = derive_stream(42, 0);
  Rng b = derive_stream(42, 0);
  Rng c = derive_stream(42, 1);
  Rng d = derive_stream(43, 0);
  const auto va = a();
  CHECK(va == b());
  CHECK(va != c());
  CHECK(va != d());
}

TEST_CASE("uniform helpers stay in range") {
  Rng rng = derive_stream(1, 2);
  for (int i = 0; i < 1000; ++i) {
    CHECK(uniform_index(rng, 7) < 7);
    const auto v = uniform_between(rng, 3, 5);
    CHECK((v >= 3 && v <= 5));
    const double r = uniform_real(rng, -1.0, 2.0);
    CHECK((r >= -1.0 && r <= 2.0));
  }
  CHECK(uniform_between(rng, 4, 4) == 4);
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) { CHECK(h.load() == 1); }
  CHECK_THROWS_WITH_AS(parallel_for(50, 4,
                                    [](std::size_t i) {
                                      if (i == 17) { throw Error("boom"); }
                                    }),
                       "boom", Error);
}
