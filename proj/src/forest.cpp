#include <tschief/forest.hpp>
#include <tschief/parallel.hpp>

#include <algorithm>
#include <chrono>
#include <numeric>

namespace tschief {

  namespace {

    double seconds_since(std::chrono::steady_clock::time_point start) {
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }

  } // namespace

  void ForestConfig::validate() const {
    if (k < 1) { throw ConfigError("k must be >= 1 (got " + std::to_string(k) + ")"); }
    if (Ce + Cb + Cr < 1) { throw ConfigError("Ce + Cb + Cr must be >= 1"); }
    if (Cb > 0 && t < 1) { throw ConfigError("t must be >= 1 when Cb > 0"); }
  }

  Forest::Forest(ForestConfig config, std::size_t series_length, std::size_t class_count,
                 std::vector<BossTransform> boss_pool, std::vector<Tree> trees)
      : config_(config), series_length_(series_length), class_count_(class_count), boss_pool_(std::move(boss_pool)),
        trees_(std::move(trees)) {
    config_.validate();
    if (trees_.size() != config_.k) { throw Error("forest holds a different number of trees than k"); }
    if (class_count_ == 0) { throw Error("forest needs at least one class"); }
  }

  Forest Forest::train(const LabeledDataset& data, const ForestConfig& config, TrainingReport* report) {
    config.validate();
    const std::size_t length = data.series_length();
    if (config.Cr > 0 && length < min_interval_length) {
      throw Error("series length " + std::to_string(length) + " is below 16, required by interval splitters");
    }
    if (config.Cb > 0 && length < boss_min_window) {
      throw Error("series length " + std::to_string(length) + " is below 10, required by dictionary splitters");
    }
    const std::size_t threads = resolve_threads(config.threads);

    auto start = std::chrono::steady_clock::now();
    std::vector<BossTransform> pool;
    if (config.Cb > 0) {
      Rng pool_rng = derive_stream(config.seed, streams::boss_pool);
      pool = precompute_transforms(data, config.t, pool_rng, threads);
    }
    const double pool_seconds = seconds_since(start);

    start = std::chrono::steady_clock::now();
    const TrainingContext ctx(data, pool);
    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const BuildOptions options{config.counts(), config.audit};
    std::vector<std::optional<Tree>> grown(config.k);
    std::vector<TreeStats> stats(config.k);
    parallel_for(config.k, threads, [&](std::size_t i) {
      Rng rng = derive_stream(config.seed, i);
      grown[i] = build_tree(ctx, all, options, rng, &stats[i]);
    });
    const double tree_seconds = seconds_since(start);

    std::vector<Tree> trees;
    trees.reserve(config.k);
    for (auto& t : grown) { trees.push_back(std::move(*t)); }
    if (report) {
      report->stats = TreeStats{};
      for (const auto& s : stats) { report->stats.merge(s); }
      report->pool_seconds = pool_seconds;
      report->tree_seconds = tree_seconds;
    }
    return Forest(config, length, data.class_count(), std::move(pool), std::move(trees));
  }

  void Forest::set_label_names(std::vector<std::int64_t> names) {
    if (!names.empty() && names.size() != class_count_) { throw Error("label names do not match the class count"); }
    label_names_ = std::move(names);
  }

  std::vector<std::size_t> Forest::votes(std::span<const double> query) const {
    if (query.size() != series_length_) {
      throw Error("length mismatch: query has " + std::to_string(query.size()) + " values, model expects "
                  + std::to_string(series_length_));
    }
    std::vector<std::size_t> counts(class_count_, 0);
    QueryCache memo(query);
    for (const auto& tree : trees_) {
      const Label l = classify(tree, memo, boss_pool_);
      if (l >= class_count_) { throw Error("tree predicted an unknown class"); }
      ++counts[l];
    }
    return counts;
  }

  Label Forest::predict(std::span<const double> query) const {
    const auto counts = votes(query);
    return static_cast<Label>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  }

  std::vector<double> Forest::predict_proba(std::span<const double> query) const {
    const auto counts = votes(query);
    std::vector<double> p(counts.size());
    const double total = static_cast<double>(trees_.size());
    for (std::size_t c = 0; c < counts.size(); ++c) { p[c] = static_cast<double>(counts[c]) / total; }
    return p;
  }

  std::vector<Label> Forest::predict(std::span<const TimeSeries> queries, std::size_t threads) const {
    std::vector<Label> out(queries.size());
    parallel_for(queries.size(), threads, [&](std::size_t i) { out[i] = predict(queries[i].values()); });
    return out;
  }

  Evaluation evaluate(const Forest& forest, const LabeledDataset& test, std::size_t threads) {
    if (test.size() == 0) { throw Error("empty test set"); }
    if (test.series_length() != forest.series_length()) {
      throw Error("length mismatch: test series have " + std::to_string(test.series_length())
                  + " values, model expects " + std::to_string(forest.series_length()));
    }
    Evaluation ev;
    ev.predictions = forest.predict(test.all_series(), threads);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) { correct += ev.predictions[i] == test.label(i) ? 1 : 0; }
    ev.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
    return ev;
  }

} // namespace tschief
