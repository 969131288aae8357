#pragma once

#include <tschief/core.hpp>
#include <tschief/forest.hpp>
#include <tschief/rng.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tschief {

  /// Sorted original labels; class index i stands for originals[i].
  class LabelMap {
  public:
    LabelMap() = default;
    explicit LabelMap(std::vector<std::int64_t> originals);

    [[nodiscard]] std::span<const std::int64_t> originals() const noexcept { return originals_; }
    [[nodiscard]] std::size_t size() const noexcept { return originals_.size(); }
    /// Throws Error for a label outside the map.
    [[nodiscard]] Label index_of(std::int64_t original) const;
    [[nodiscard]] std::int64_t original(Label index) const;

    friend bool operator==(const LabelMap&, const LabelMap&) = default;

  private:
    std::vector<std::int64_t> originals_;
  };

  struct LoadedDataset {
    LabeledDataset data;
    LabelMap labels;
  };

  /** Reads a UCR-style file: one series per row, class label first.
   *  Fields are comma separated when the file contains a comma, otherwise whitespace separated.
   *  Without `labels` a fresh map is built from the file; with one, every label must be in it. */
  LoadedDataset load_ucr_file(const std::filesystem::path& path, const LabelMap* labels = nullptr,
                              bool znorm = false);

  /// Parses UCR rows from a stream; `source` names it in error messages.
  LoadedDataset parse_ucr(std::istream& in, const std::string& source, const LabelMap* labels = nullptr,
                          bool znorm = false);

  /** Class-proportional sample of `size` instances, at least one per class, in random order.
   *  Throws Error when size is below the class count or above the dataset size. */
  LabeledDataset stratified_subsample(const LabeledDataset& data, std::size_t size, Rng& rng);

  /// Noisy class-dependent sinusoids, z-normalised, classes balanced.
  LabeledDataset synthetic_dataset(std::size_t size, std::size_t length, std::size_t classes, std::uint64_t seed);

  inline constexpr std::uint16_t model_format_version = 1;

  /// Writes the config, label names, BOSS parameters and MCB tables, and every tree.
  void save_model(const Forest& forest, std::ostream& out);
  void save_model(const Forest& forest, const std::filesystem::path& path);

  /// Throws Error("not a model file") on a bad magic, and Error on version mismatch or truncation.
  Forest load_model(std::istream& in);
  Forest load_model(const std::filesystem::path& path);

  struct ResultsRecord {
    std::string dataset;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::size_t series_length = 0;
    std::size_t classes = 0;
    ForestConfig config;
    double accuracy = 0.0;
    double train_seconds = 0.0;
    double test_seconds = 0.0;
    std::array<std::size_t, splitter_type_count> nodes_by_type{};
  };

  inline constexpr std::string_view results_header =
    "dataset,n_train,n_test,series_length,classes,k,t,Ce,Cb,Cr,seed,accuracy,train_seconds,test_seconds,"
    "sim_nodes,dict_nodes,interval_nodes";

  std::string format_results_row(const ResultsRecord& record);

  /// Appends one row per record, flushing each; the header is written when the file is new or empty.
  void write_results(std::span<const ResultsRecord> records, const std::filesystem::path& path);

} // namespace tschief
