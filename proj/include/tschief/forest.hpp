#pragma once

#include <tschief/core.hpp>
#include <tschief/dictionary.hpp>
#include <tschief/tree.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace tschief {

  struct ForestConfig {
    std::size_t k = 500;
    std::size_t t = 1000;
    std::size_t Ce = 5;
    std::size_t Cb = 100;
    std::size_t Cr = 100;
    std::uint64_t seed = 0;
    /// 0 means all hardware threads. Results never depend on it.
    std::size_t threads = 0;
    /// Record a NodeAudit for every internal node.
    bool audit = false;

    /// Throws ConfigError naming the violated bound.
    void validate() const;
    [[nodiscard]] CandidateCounts counts() const { return {Ce, Cb, Cr}; }

    friend bool operator==(const ForestConfig&, const ForestConfig&) = default;
  };

  struct TrainingReport {
    TreeStats stats;
    double pool_seconds = 0.0;
    double tree_seconds = 0.0;
  };

  class Forest {
  public:
    Forest(ForestConfig config, std::size_t series_length, std::size_t class_count,
           std::vector<BossTransform> boss_pool, std::vector<Tree> trees);

    /** Fits the BOSS pool once, then grows config.k trees, tree i on RNG stream i of config.seed.
     *  Throws ConfigError on an invalid config and Error when the series are too short for an
     *  enabled splitter type (16 for intervals, 10 for dictionaries). */
    static Forest train(const LabeledDataset& data, const ForestConfig& config, TrainingReport* report = nullptr);

    [[nodiscard]] const ForestConfig& config() const noexcept { return config_; }
    [[nodiscard]] std::size_t series_length() const noexcept { return series_length_; }
    [[nodiscard]] std::size_t class_count() const noexcept { return class_count_; }
    [[nodiscard]] std::span<const Tree> trees() const noexcept { return trees_; }
    [[nodiscard]] std::span<const BossTransform> boss_pool() const noexcept { return boss_pool_; }

    /// Original dataset label of each class index; empty when unknown.
    [[nodiscard]] std::span<const std::int64_t> label_names() const noexcept { return label_names_; }
    void set_label_names(std::vector<std::int64_t> names);

    /// Vote count per class. Throws Error on a length mismatch.
    [[nodiscard]] std::vector<std::size_t> votes(std::span<const double> query) const;

    /// Plurality vote, lowest class index on ties.
    [[nodiscard]] Label predict(std::span<const double> query) const;
    [[nodiscard]] Label predict(const TimeSeries& query) const { return predict(query.values()); }

    /// Vote fractions per class.
    [[nodiscard]] std::vector<double> predict_proba(std::span<const double> query) const;
    [[nodiscard]] std::vector<double> predict_proba(const TimeSeries& query) const {
      return predict_proba(query.values());
    }

    /// Queries are classified on up to `threads` workers; output order follows input order.
    [[nodiscard]] std::vector<Label> predict(std::span<const TimeSeries> queries, std::size_t threads = 1) const;

  private:
    ForestConfig config_;
    std::size_t series_length_;
    std::size_t class_count_;
    std::vector<BossTransform> boss_pool_;
    std::vector<Tree> trees_;
    std::vector<std::int64_t> label_names_;
  };

  struct Evaluation {
    double accuracy = 0.0;
    std::vector<Label> predictions;
  };

  /// Throws Error on an empty test set or mismatched series length.
  Evaluation evaluate(const Forest& forest, const LabeledDataset& test, std::size_t threads = 1);

} // namespace tschief
