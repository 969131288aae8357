#pragma once

#include <tschief/core.hpp>
#include <tschief/dictionary.hpp>
#include <tschief/distances.hpp>
#include <tschief/rng.hpp>
#include <tschief/spectral.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace tschief {

  enum class SplitterType : std::uint8_t { Similarity, Dictionary, Interval };

  inline constexpr std::size_t splitter_type_count = 3;

  std::string_view to_string(SplitterType type);

  /// Nearest exemplar under an elastic measure; exemplars[b] anchors branch b.
  struct SimilaritySplitter {
    ParameterizedMeasure measure;
    std::vector<TimeSeries> exemplars;
  };

  /// Nearest exemplar histogram under BOSS distance, using transform `transform_index` of the forest pool.
  struct DictionarySplitter {
    std::size_t transform_index = 0;
    std::vector<WordHistogram> exemplars;
  };

  /// Binary attribute/threshold test on an interval transform: <= threshold goes to branch 0.
  struct IntervalSplitter {
    Interval interval;
    TransformKind kind = TransformKind::Acf;
    std::size_t attribute = 0;
    double threshold = 0.0;
  };

  using Splitter = std::variant<SimilaritySplitter, DictionarySplitter, IntervalSplitter>;

  SplitterType type_of(const Splitter& splitter);
  std::size_t branch_count(const Splitter& splitter);

  struct Leaf {
    Label label = 0;
    /// Impure leaf: no candidate could separate the node's instances.
    bool forced = false;
  };

  inline constexpr std::int32_t dropped_branch = -1;

  struct Internal {
    Splitter splitter;
    /// Child node ids; dropped_branch where no training instance was routed.
    std::vector<std::int32_t> branches;
    /// Node majority class, answered when a query reaches a dropped branch.
    Label fallback_label = 0;
  };

  using TreeNode = std::variant<Leaf, Internal>;

  /// Flat tree, root at index 0.
  struct Tree {
    std::size_t series_length = 0;
    std::vector<TreeNode> nodes;

    [[nodiscard]] std::size_t depth() const;
    [[nodiscard]] std::size_t leaf_count() const;
    [[nodiscard]] std::array<std::size_t, splitter_type_count> internal_counts() const;
  };

  /// Read-only training state shared by every tree of a forest.
  struct TrainingContext {
    TrainingContext(const LabeledDataset& data, std::span<const BossTransform> boss_pool);

    const LabeledDataset& data;
    std::span<const BossTransform> boss_pool;
    DatasetStats stats;
    /// Derivative of every training series (empty below 3 points).
    std::vector<std::vector<double>> derivatives;
  };

  struct CandidateCounts {
    std::size_t similarity = 5;
    std::size_t dictionary = 100;
    std::size_t interval = 100;
  };

  /// Candidate exemplars are training indices, one per class present at the node, ascending class order.
  struct SimilarityCandidate {
    ParameterizedMeasure measure;
    std::vector<std::size_t> exemplars;
  };

  struct DictionaryCandidate {
    std::size_t transform_index = 0;
    std::vector<std::size_t> exemplars;
  };

  struct IntervalCandidate {
    Interval interval;
    TransformKind kind = TransformKind::Acf;
    std::size_t attribute = 0;
    double threshold = 0.0;
    double weighted_gini = 0.0;
    bool splittable = false;
    /// Attribute value of every node instance, in node order.
    std::vector<double> values;
  };

  std::vector<SimilarityCandidate> generate_similarity_splitters(const TrainingContext& ctx,
                                                                 std::span<const std::size_t> node,
                                                                 std::size_t count, Rng& rng);

  std::vector<DictionaryCandidate> generate_dictionary_splitters(const TrainingContext& ctx,
                                                                 std::span<const std::size_t> node,
                                                                 std::size_t count, Rng& rng);

  /// count/4 attributes per transform, spread over ceil((count/4)/16) random intervals.
  struct IntervalPlan {
    std::size_t per_transform = 0;
    std::size_t intervals = 0;
    std::size_t attributes = 0;
  };

  IntervalPlan interval_plan(std::size_t count);

  /// Empty when the series are shorter than the minimum interval.
  std::vector<IntervalCandidate> generate_interval_splitters(const TrainingContext& ctx,
                                                             std::span<const std::size_t> node, std::size_t count,
                                                             Rng& rng);

  struct ThresholdSplit {
    double threshold = 0.0;
    double weighted_gini = 0.0;
    /// False when all values are equal; weighted_gini is then the parent gini.
    bool splittable = false;
  };

  /// Best midpoint threshold for a <= / > split, by weighted gini; the lowest threshold wins ties.
  ThresholdSplit find_best_threshold(std::span<const double> values, std::span<const Label> labels,
                                     std::size_t class_count);

  /// Branch of each node instance, in node order.
  using Assignment = std::vector<std::uint32_t>;

  /// Ties between equally close exemplars are broken uniformly at random.
  Assignment assign(const TrainingContext& ctx, std::span<const std::size_t> node, const SimilarityCandidate& c,
                    Rng& rng);
  Assignment assign(const TrainingContext& ctx, std::span<const std::size_t> node, const DictionaryCandidate& c,
                    Rng& rng);
  Assignment assign(const IntervalCandidate& c);

  /// Training indices per branch.
  std::vector<std::vector<std::size_t>> partition(std::span<const std::size_t> node, const Assignment& assignment,
                                                  std::size_t branches);

  /// Per-branch class distributions of an assignment.
  std::vector<ClassDistribution> branch_distributions(const LabeledDataset& data, std::span<const std::size_t> node,
                                                      const Assignment& assignment, std::size_t branches);

  /// Record of one internal node's selection, kept when auditing.
  struct NodeAudit {
    std::size_t node_size = 0;
    SplitterType chosen = SplitterType::Similarity;
    /// Weighted gini recomputed from the partition stored for the chosen splitter.
    double chosen_gini = 0.0;
    /// Lowest weighted gini among all candidates that split the node.
    double best_candidate_gini = 0.0;
    std::array<std::size_t, splitter_type_count> candidates{};
  };

  struct TreeStats {
    std::array<std::size_t, splitter_type_count> nodes_by_type{};
    /// Time spent generating and evaluating candidates of each type.
    std::array<double, splitter_type_count> seconds_by_type{};
    std::size_t leaves = 0;
    std::size_t forced_leaves = 0;
    std::vector<NodeAudit> audit;

    void merge(const TreeStats& other);
  };

  struct BuildOptions {
    CandidateCounts counts;
    bool audit = false;
  };

  /** Grows a tree on `indices` until every leaf is pure or cannot be split.
   *  Uses an explicit work stack, so depth is bounded only by the instance count. */
  Tree build_tree(const TrainingContext& ctx, std::span<const std::size_t> indices, const BuildOptions& options,
                  Rng& rng, TreeStats* stats = nullptr);

  /// Lazily computed views of one query, shared by the trees that classify it.
  class QueryCache {
  public:
    explicit QueryCache(std::span<const double> query) : query_(query) {}

    [[nodiscard]] std::span<const double> query() const noexcept { return query_; }
    std::span<const double> derivative();
    /// The query transformed by `transform`, computed at most once per transform index.
    HistogramView histogram(std::size_t transform_index, const BossTransform& transform);
    [[nodiscard]] std::size_t cached_histograms() const noexcept { return histograms_.size(); }

  private:
    std::span<const double> query_;
    std::optional<std::vector<double>> derivative_;
    std::unordered_map<std::size_t, WordHistogram> histograms_;
  };

  /// Branch taken by the query; the lowest branch wins distance ties.
  std::size_t route(const Splitter& splitter, QueryCache& memo, std::span<const BossTransform> boss_pool);

  /// Throws Error on a query whose length differs from the training series.
  Label classify(const Tree& tree, QueryCache& memo, std::span<const BossTransform> boss_pool);

} // namespace tschief
