#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tschief {

  /// Base class of every error raised by the library.
  class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
  };

  /// A configuration value is outside its legal bounds.
  class ConfigError : public Error {
  public:
    using Error::Error;
  };

  /// Class identifier in [0, class_count).
  using Label = std::uint32_t;

  /** Fixed-length univariate series.
   *  Holds at least two finite values; immutable once built. */
  class TimeSeries {
  public:
    explicit TimeSeries(std::vector<double> values);

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t length() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

  private:
    std::vector<double> values_;
  };

  /** Equal-length series with class labels in [0, class_count).
   *  A test split may miss some classes; use require_all_classes() for training data. */
  class LabeledDataset {
  public:
    LabeledDataset(std::vector<TimeSeries> series, std::vector<Label> labels, std::size_t class_count);

    /// Class count inferred as max(label) + 1.
    LabeledDataset(std::vector<TimeSeries> series, std::vector<Label> labels);

    [[nodiscard]] std::size_t size() const noexcept { return series_.size(); }
    [[nodiscard]] std::size_t series_length() const noexcept { return series_.front().length(); }
    [[nodiscard]] std::size_t class_count() const noexcept { return class_count_; }

    [[nodiscard]] const TimeSeries& series(std::size_t i) const { return series_[i]; }
    [[nodiscard]] Label label(std::size_t i) const { return labels_[i]; }
    [[nodiscard]] std::span<const TimeSeries> all_series() const noexcept { return series_; }
    [[nodiscard]] std::span<const Label> labels() const noexcept { return labels_; }

    [[nodiscard]] std::vector<std::size_t> class_counts() const;

    /// Throws Error unless every class in [0, class_count) has an instance.
    void require_all_classes() const;

    /// Copy of the instances at `indices`, keeping the class count.
    [[nodiscard]] LabeledDataset subset(std::span<const std::size_t> indices) const;

  private:
    std::vector<TimeSeries> series_;
    std::vector<Label> labels_;
    std::size_t class_count_;
  };

  /// Dense per-class counts.
  class ClassDistribution {
  public:
    explicit ClassDistribution(std::size_t class_count) : counts_(class_count, 0) {}

    void add(Label c, std::size_t n = 1) {
      counts_[c] += n;
      total_ += n;
    }

    [[nodiscard]] std::size_t count(Label c) const { return counts_[c]; }
    [[nodiscard]] std::size_t total() const noexcept { return total_; }
    [[nodiscard]] std::size_t class_count() const noexcept { return counts_.size(); }
    [[nodiscard]] std::span<const std::size_t> counts() const noexcept { return counts_; }
    [[nodiscard]] bool empty() const noexcept { return total_ == 0; }

    /// Number of classes with a nonzero count.
    [[nodiscard]] std::size_t present_classes() const;

    /// Most frequent class, lowest index on ties.
    [[nodiscard]] Label majority() const;

  private:
    std::vector<std::size_t> counts_;
    std::size_t total_ = 0;
  };

  /// Distribution of `labels` restricted to `indices`.
  ClassDistribution distribution_of(const LabeledDataset& data, std::span<const std::size_t> indices);

  /// 1 - sum_c p_c^2. Throws Error("empty partition") on an empty distribution.
  double gini(const ClassDistribution& dist);

  /// Size-weighted gini over the branches of a split; empty branches contribute 0.
  double weighted_gini(std::size_t parent_total, std::span<const ClassDistribution> partitions);

  /// Population z-normalisation; a series with stddev < 1e-8 maps to all zeros.
  std::vector<double> znormalize(std::span<const double> values);
  TimeSeries znormalize(const TimeSeries& series);

  /// Length and population stddev of all values of a dataset.
  struct DatasetStats {
    std::size_t length = 0;
    double stddev = 0.0;
  };

  DatasetStats dataset_stats(const LabeledDataset& data);

} // namespace tschief
