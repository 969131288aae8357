#pragma once

#include <tschief/core.hpp>
#include <tschief/rng.hpp>

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace tschief {

  inline constexpr std::size_t boss_alphabet_size = 4;
  inline constexpr std::size_t boss_min_window = 10;
  inline constexpr std::array<std::size_t, 6> boss_word_lengths{6, 8, 10, 12, 14, 16};

  /// Windows longer than this use the incremental sliding DFT.
  inline constexpr std::size_t boss_mft_threshold = 64;

  struct BossParams {
    std::size_t window = boss_min_window;
    std::size_t word_length = 8;
    std::size_t alphabet = boss_alphabet_size;
    bool norm = false;

    friend bool operator==(const BossParams&, const BossParams&) = default;
  };

  /// Number of interleaved real/imaginary DFT values available for a window.
  /// norm drops bin 0.
  std::size_t usable_coefficients(std::size_t window, bool norm);

  /// Throws Error when `params` cannot be applied to series of `series_length`.
  void validate(const BossParams& params, std::size_t series_length);

  /// w uniform in [10, length], norm uniform, f uniform among the legal word lengths.
  BossParams sample_boss_params(Rng& rng, std::size_t series_length);

  /** Per-position quantisation breakpoints (alphabet - 1 per position, non-decreasing).
   *  A value equal to a breakpoint maps to the lower symbol. */
  struct MCBTable {
    std::vector<std::vector<double>> boundaries;

    [[nodiscard]] std::size_t positions() const noexcept { return boundaries.size(); }
    [[nodiscard]] std::size_t symbol(std::size_t position, double value) const;

    friend bool operator==(const MCBTable&, const MCBTable&) = default;
  };

  /// Equi-depth breakpoints: the k/alpha empirical quantiles of each column, k = 1..alpha-1.
  MCBTable fit_mcb(std::span<const std::vector<double>> columns, std::size_t alphabet);

  /** First f interleaved (re, im) DFT values of `window`, starting at bin 1 when norm is set.
   *  No normalisation is applied here. */
  std::vector<double> sfa_coefficients(std::span<const double> window, std::size_t f, bool norm);

  /** Coefficients of every sliding window of `series`, row-major (windows x word_length).
   *  Each window is divided by its population stddev (1 when below 1e-8) before the DFT. */
  std::vector<double> sliding_coefficients(std::span<const double> series, const BossParams& params);

  /// Word id of one coefficient row: symbols in base `alphabet`, first position most significant.
  std::uint32_t quantize_word(std::span<const double> coefficients, const MCBTable& mcb, std::size_t alphabet);

  struct WordCount {
    std::uint32_t word;
    std::uint32_t count;

    friend bool operator==(const WordCount&, const WordCount&) = default;
  };

  using HistogramView = std::span<const WordCount>;

  /// Sparse word histogram, entries sorted by word id, all counts >= 1.
  class WordHistogram {
  public:
    WordHistogram() = default;

    /// Histogram of a word stream; callers apply numerosity reduction beforehand.
    static WordHistogram from_words(std::vector<std::uint32_t> words);
    /// Takes entries that are already sorted and unique.
    static WordHistogram from_entries(std::vector<WordCount> entries);

    [[nodiscard]] HistogramView view() const noexcept { return entries_; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] std::uint32_t count(std::uint32_t word) const;
    [[nodiscard]] std::size_t total() const;

    friend bool operator==(const WordHistogram&, const WordHistogram&) = default;

  private:
    std::vector<WordCount> entries_;
  };

  /// Words of every window after numerosity reduction (runs collapsed to one word).
  std::vector<std::uint32_t> series_words(std::span<const double> series, const BossParams& params,
                                          const MCBTable& mcb);

  /// Throws Error when the series is shorter than the window.
  WordHistogram transform_series(std::span<const double> series, const BossParams& params, const MCBTable& mcb);

  /** Squared difference summed over the words present in `a` only.
   *  Returns +inf once the partial sum exceeds `cutoff`. */
  double boss_dist(HistogramView a, HistogramView b, double cutoff = std::numeric_limits<double>::infinity());

  /** One sampled BOSS parameter set, its fitted MCB table, and the histogram of every
   *  training series. A transform read back from a model file has no training histograms. */
  class BossTransform {
  public:
    BossTransform(BossParams params, MCBTable mcb);

    /// Fits the MCB table on every window of every series of `data`, then transforms them all.
    static BossTransform fit(const LabeledDataset& data, const BossParams& params);

    [[nodiscard]] const BossParams& params() const noexcept { return params_; }
    [[nodiscard]] const MCBTable& mcb() const noexcept { return mcb_; }

    /// Number of stored training histograms.
    [[nodiscard]] std::size_t size() const noexcept { return offsets_.size() - 1; }
    [[nodiscard]] HistogramView histogram(std::size_t i) const;

    [[nodiscard]] WordHistogram transform(std::span<const double> series) const;

  private:
    BossParams params_;
    MCBTable mcb_;
    std::vector<WordCount> entries_;
    std::vector<std::size_t> offsets_{0};
  };

  /** Pool of `t` transforms. Parameters are drawn in order from `rng`; the fitting work runs
   *  on up to `threads` workers and does not depend on the thread count.
   *  Throws Error("series too short for BOSS") when the series length is below 10. */
  std::vector<BossTransform> precompute_transforms(const LabeledDataset& data, std::size_t t, Rng& rng,
                                                   std::size_t threads = 1);

} // namespace tschief
