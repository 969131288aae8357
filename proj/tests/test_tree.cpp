#include <doctest.h>

#include "oracles.hpp"

#include <tschief/io.hpp>
#include <tschief/tree.hpp>

#include <numeric>

using namespace tschief;

namespace {

  std::vector<std::size_t> all_indices(const LabeledDataset& d) {
    std::vector<std::size_t> idx(d.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return idx;
  }

  std::vector<BossTransform> make_pool(const LabeledDataset& d, std::size_t t) {
    Rng rng = derive_stream(99, streams::boss_pool);
    return precompute_transforms(d, t, rng);
  }

} // namespace

TEST_CASE("best threshold matches exhaustive search") {
  Rng rng = derive_stream(41, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = uniform_between(rng, 2, 12);
    const std::size_t classes = uniform_between(rng, 2, 4);
    std::vector<double> values(n);
    std::vector<Label> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      values[i] = static_cast<double>(uniform_index(rng, 5));
      labels[i] = static_cast<Label>(uniform_index(rng, classes));
    }
    const auto split = find_best_threshold(values, labels, classes);
    CHECK(split.weighted_gini == doctest::Approx(oracle::best_threshold_gini(values, labels, classes)).epsilon(1e-12));
    if (split.splittable) {
      std::vector<std::uint32_t> branch(n);
      for (std::size_t i = 0; i < n; ++i) { branch[i] = values[i] <= split.threshold ? 0 : 1; }
      CHECK(oracle::weighted_gini(branch, labels, classes) == doctest::Approx(split.weighted_gini).epsilon(1e-12));
    }
  }
}

TEST_CASE("threshold examples") {
  const std::vector<double> v{1.0, 2.0, 3.0};
  const std::vector<Label> l{0, 1, 0};
  const auto s = find_best_threshold(v, l, 2);
  CHECK(s.splittable);
  CHECK(s.threshold == 1.5);
  CHECK(s.weighted_gini == doctest::Approx(1.0 / 3.0));

  const std::vector<double> flat{4.0, 4.0, 4.0};
  const auto f = find_best_threshold(flat, l, 2);
  CHECK_FALSE(f.splittable);
  CHECK(f.weighted_gini == doctest::Approx(4.0 / 9.0));

  // adjacent doubles: the midpoint rounds to the upper value, so the lower one is used
  const double lo = 1.0;
  const double hi = std::nextafter(1.0, 2.0);
  const std::vector<double> tight{lo, hi};
  const std::vector<Label> two{0, 1};
  const auto t = find_best_threshold(tight, two, 2);
  CHECK(t.threshold >= lo);
  CHECK(t.threshold < hi);
  CHECK(t.weighted_gini == 0.0);
}

TEST_CASE("interval plan divides the budget over intervals") {
  const auto p = interval_plan(100);
  CHECK(p.per_transform == 25);
  CHECK(p.intervals == 2);
  CHECK(p.attributes == 12);
  CHECK(interval_plan(3).intervals == 0);
  const auto one = interval_plan(4);
  CHECK(one.intervals == 1);
  CHECK(one.attributes == 1);
}

TEST_CASE("candidate generators pick one exemplar per present class") {
  const auto data = synthetic_dataset(30, 32, 3, 5);
  const auto pool = make_pool(data, 4);
  const TrainingContext ctx(data, pool);
  std::vector<std::size_t> node{0, 1, 2, 3, 4, 5, 6, 7};
  std::erase_if(node, [&](std::size_t i) { return data.label(i) == 2; });
  Rng rng = derive_stream(42, 0);
  for (const auto& c : generate_similarity_splitters(ctx, node, 5, rng)) {
    REQUIRE(c.exemplars.size() == 2);
    CHECK(data.label(c.exemplars[0]) == 0);
    CHECK(data.label(c.exemplars[1]) == 1);
  }
  for (const auto& c : generate_dictionary_splitters(ctx, node, 5, rng)) {
    CHECK(c.exemplars.size() == 2);
    CHECK(c.transform_index < pool.size());
  }
  const auto intervals = generate_interval_splitters(ctx, node, 100, rng);
  CHECK(intervals.size() <= 4 * 2 * 12);
  CHECK(!intervals.empty());
  for (const auto& c : intervals) {
    CHECK(c.values.size() == node.size());
    CHECK(c.attribute < transformed_length(c.interval.length, c.kind));
  }
  const TrainingContext no_pool(data, {});
  CHECK_THROWS_AS(generate_dictionary_splitters(no_pool, node, 1, rng), Error);
}

TEST_CASE("assignments send exemplars to their own branch") {
  const auto data = synthetic_dataset(20, 24, 2, 6);
  const auto pool = make_pool(data, 3);
  const TrainingContext ctx(data, pool);
  const auto node = all_indices(data);
  Rng rng = derive_stream(43, 0);
  for (const auto& c : generate_similarity_splitters(ctx, node, 10, rng)) {
    const auto a = assign(ctx, node, c, rng);
    for (std::size_t b = 0; b < c.exemplars.size(); ++b) {
      const auto pos = static_cast<std::size_t>(std::find(node.begin(), node.end(), c.exemplars[b]) - node.begin());
      CHECK(a[pos] == b);
    }
    const auto parts = partition(node, a, c.exemplars.size());
    std::size_t total = 0;
    for (const auto& p : parts) { total += p.size(); }
    CHECK(total == node.size());
  }
}

TEST_CASE("a tree fits separable training data perfectly") {
  const auto data = synthetic_dataset(40, 32, 3, 7);
  const auto pool = make_pool(data, 10);
  const TrainingContext ctx(data, pool);
  Rng rng = derive_stream(44, 0);
  TreeStats stats;
  const auto tree = build_tree(ctx, all_indices(data), {{5, 10, 10}, true}, rng, &stats);
  // dictionary distances tie often and training routes ties at random, so allow a few misfits
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    QueryCache memo(data.series(i).values());
    correct += classify(tree, memo, pool) == data.label(i) ? 1 : 0;
  }
  CHECK(correct >= 36);
  CHECK(stats.forced_leaves == 0);
  CHECK(stats.leaves == tree.leaf_count());
  const auto counts = tree.internal_counts();
  CHECK(counts[0] + counts[1] + counts[2] == stats.audit.size());
  for (const auto& a : stats.audit) { CHECK(a.chosen_gini <= a.best_candidate_gini); }
  CHECK(tree.depth() >= 1);
}

TEST_CASE("similarity-only trees contain no other splitter type") {
  const auto data = synthetic_dataset(30, 20, 2, 8);
  const TrainingContext ctx(data, {});
  Rng rng = derive_stream(45, 0);
  const auto tree = build_tree(ctx, all_indices(data), {{5, 0, 0}, false}, rng);
  for (std::size_t i = 0; i < data.size(); ++i) {
    QueryCache memo(data.series(i).values());
    CHECK(classify(tree, memo, {}) == data.label(i));
  }
  const auto counts = tree.internal_counts();
  CHECK(counts[0] > 0);
  CHECK(counts[1] == 0);
  CHECK(counts[2] == 0);
}

TEST_CASE("contradictory duplicates make a forced leaf") {
  std::vector<double> v(16);
  for (std::size_t i = 0; i < v.size(); ++i) { v[i] = static_cast<double>(i % 2); }
  const TimeSeries s(v);
  const LabeledDataset data({s, s, s}, {0, 1, 1});
  const TrainingContext ctx(data, {});
  Rng rng = derive_stream(46, 0);
  TreeStats stats;
  const auto tree = build_tree(ctx, all_indices(data), {{0, 0, 20}, false}, rng, &stats);
  REQUIRE(tree.nodes.size() == 1);
  const auto& leaf = std::get<Leaf>(tree.nodes[0]);
  CHECK(leaf.forced);
  CHECK(leaf.label == 1);
  CHECK(stats.forced_leaves == 1);
}

TEST_CASE("classification reuses cached query transforms and rejects wrong lengths") {
  const auto data = synthetic_dataset(30, 32, 2, 9);
  const auto pool = make_pool(data, 2);
  const TrainingContext ctx(data, pool);
  Rng rng = derive_stream(47, 0);
  const auto tree = build_tree(ctx, all_indices(data), {{0, 20, 0}, false}, rng);
  QueryCache memo(data.series(0).values());
  const Label first = classify(tree, memo, pool);
  CHECK(memo.cached_histograms() <= pool.size());
  CHECK(memo.cached_histograms() >= 1);
  CHECK(classify(tree, memo, pool) == first);
  const std::vector<double> wrong(31, 0.0);
  QueryCache bad(wrong);
  CHECK_THROWS_WITH_AS(classify(tree, bad, pool), doctest::Contains("length mismatch"), Error);
}

TEST_CASE("dropped branches fall back to the node majority") {
  Tree tree;
  tree.series_length = 20;
  IntervalSplitter iv{Interval{0, 16}, TransformKind::Ps, 0, -1.0};
  Internal root{iv, {1, dropped_branch}, 1};
  tree.nodes = {root, Leaf{0, false}};
  std::vector<double> q(20, 0.0);
  q[1] = 1.0;
  QueryCache memo(q);
  CHECK(classify(tree, memo, {}) == 1);
}
