#include <tschief/core.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tschief {

  TimeSeries::TimeSeries(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) {
      throw Error("time series must hold at least 2 values, got " + std::to_string(values_.size()));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw Error("non-finite value at position " + std::to_string(i));
      }
    }
  }

  LabeledDataset::LabeledDataset(std::vector<TimeSeries> series, std::vector<Label> labels, std::size_t class_count)
    : series_(std::move(series)), labels_(std::move(labels)), class_count_(class_count) {
    if (series_.empty()) { throw Error("dataset is empty"); }
    if (series_.size() != labels_.size()) {
      throw Error("dataset has " + std::to_string(series_.size()) + " series but " + std::to_string(labels_.size())
                  + " labels");
    }
    if (class_count_ == 0) { throw Error("dataset class count must be positive"); }
    const std::size_t len = series_.front().length();
    for (std::size_t i = 0; i < series_.size(); ++i) {
      if (series_[i].length() != len) {
        throw Error("series " + std::to_string(i) + " has length " + std::to_string(series_[i].length())
                    + ", expected " + std::to_string(len));
      }
      if (labels_[i] >= class_count_) {
        throw Error("label " + std::to_string(labels_[i]) + " out of range for " + std::to_string(class_count_)
                    + " classes");
      }
    }
  }

  namespace {
    std::size_t infer_class_count(const std::vector<Label>& labels) {
      if (labels.empty()) { return 1; }
      return static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1;
    }
  }

  LabeledDataset::LabeledDataset(std::vector<TimeSeries> series, std::vector<Label> labels)
    : LabeledDataset(std::move(series), labels, infer_class_count(labels)) {}

  std::vector<std::size_t> LabeledDataset::class_counts() const {
    std::vector<std::size_t> counts(class_count_, 0);
    for (Label l : labels_) { ++counts[l]; }
    return counts;
  }

  void LabeledDataset::require_all_classes() const {
    const auto counts = class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c) {
      if (counts[c] == 0) { throw Error("class " + std::to_string(c) + " has no training instance"); }
    }
  }

  LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
    std::vector<TimeSeries> series;
    std::vector<Label> labels;
    series.reserve(indices.size());
    labels.reserve(indices.size());
    for (std::size_t i : indices) {
      series.push_back(series_.at(i));
      labels.push_back(labels_[i]);
    }
    return {std::move(series), std::move(labels), class_count_};
  }

  std::size_t ClassDistribution::present_classes() const {
    return static_cast<std::size_t>(std::count_if(counts_.begin(), counts_.end(), [](std::size_t c) { return c > 0; }));
  }

  Label ClassDistribution::majority() const {
    // max_element returns the first maximum: lowest class index wins ties
    return static_cast<Label>(std::max_element(counts_.begin(), counts_.end()) - counts_.begin());
  }

  ClassDistribution distribution_of(const LabeledDataset& data, std::span<const std::size_t> indices) {
    ClassDistribution dist(data.class_count());
    for (std::size_t i : indices) { dist.add(data.label(i)); }
    return dist;
  }

  double gini(const ClassDistribution& dist) {
    if (dist.empty()) { throw Error("empty partition"); }
    const double total = static_cast<double>(dist.total());
    double sum_sq = 0.0;
    for (std::size_t c : dist.counts()) {
      const double p = static_cast<double>(c) / total;
      sum_sq += p * p;
    }
    return 1.0 - sum_sq;
  }

  double weighted_gini(std::size_t parent_total, std::span<const ClassDistribution> partitions) {
    const double parent = static_cast<double>(parent_total);
    double result = 0.0;
    for (const auto& part : partitions) {
      if (part.empty()) { continue; }
      result += (static_cast<double>(part.total()) / parent) * gini(part);
    }
    return result;
  }

  std::vector<double> znormalize(std::span<const double> values) {
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double var = 0.0;
    for (double v : values) { var += (v - mean) * (v - mean); }
    const double sd = std::sqrt(var / n);
    std::vector<double> out(values.size(), 0.0);
    if (sd < 1e-8) { return out; }
    for (std::size_t i = 0; i < values.size(); ++i) { out[i] = (values[i] - mean) / sd; }
    return out;
  }

  TimeSeries znormalize(const TimeSeries& series) { return TimeSeries(znormalize(series.values())); }

  DatasetStats dataset_stats(const LabeledDataset& data) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& s : data.all_series()) {
      for (double v : s.values()) { sum += v; }
      count += s.length();
    }
    const double mean = sum / static_cast<double>(count);
    double var = 0.0;
    for (const auto& s : data.all_series()) {
      for (double v : s.values()) { var += (v - mean) * (v - mean); }
    }
    return {data.series_length(), std::sqrt(var / static_cast<double>(count))};
  }

} // namespace tschief
