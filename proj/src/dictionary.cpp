#include <tschief/dictionary.hpp>
#include <tschief/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace tschief {

  namespace {

    struct Twiddles {
      std::vector<double> cos_table;
      std::vector<double> sin_table;

      explicit Twiddles(std::size_t w) : cos_table(w), sin_table(w) {
        for (std::size_t r = 0; r < w; ++r) {
          const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(w);
          cos_table[r] = std::cos(angle);
          sin_table[r] = std::sin(angle);
        }
      }
    };

    /// Writes the f interleaved coefficients of `x` into `out` (bin index k uses (k*t) mod w).
    void dft_coefficients(std::span<const double> x, std::size_t f, std::size_t first_bin, const Twiddles& tw,
                          double* out) {
      const std::size_t w = x.size();
      for (std::size_t idx = 0; idx < f; idx += 2) {
        const std::size_t k = first_bin + idx / 2;
        double re = 0.0;
        double im = 0.0;
        std::size_t r = 0;
        for (std::size_t t = 0; t < w; ++t) {
          re += x[t] * tw.cos_table[r];
          im -= x[t] * tw.sin_table[r];
          r += k;
          if (r >= w) { r %= w; }
        }
        out[idx] = re;
        if (idx + 1 < f) { out[idx + 1] = im; }
      }
    }

    inline double safe_stddev(double var) {
      const double sd = var > 0.0 ? std::sqrt(var) : 0.0;
      return sd < 1e-8 ? 1.0 : sd;
    }

  } // namespace

  std::size_t usable_coefficients(std::size_t window, bool norm) {
    const std::size_t bins = window / 2 + 1;
    return 2 * (norm ? bins - 1 : bins);
  }

  void validate(const BossParams& p, std::size_t series_length) {
    if (p.alphabet < 2) { throw Error("BOSS alphabet size must be at least 2"); }
    if (p.window < 2 || p.window > series_length) {
      throw Error("BOSS window " + std::to_string(p.window) + " outside [2, " + std::to_string(series_length) + "]");
    }
    if (p.word_length == 0 || p.word_length > usable_coefficients(p.window, p.norm)) {
      throw Error("BOSS word length " + std::to_string(p.word_length) + " too large for window "
                  + std::to_string(p.window));
    }
    const double id_bits = static_cast<double>(p.word_length) * std::log2(static_cast<double>(p.alphabet));
    if (id_bits > 32.0) { throw Error("BOSS word ids do not fit in 32 bits"); }
  }

  BossParams sample_boss_params(Rng& rng, std::size_t series_length) {
    if (series_length < boss_min_window) { throw Error("series too short for BOSS"); }
    BossParams p;
    p.window = uniform_between(rng, boss_min_window, series_length);
    p.norm = uniform_index(rng, 2) == 1;
    const std::size_t usable = usable_coefficients(p.window, p.norm);
    std::size_t legal = 0;
    while (legal < boss_word_lengths.size() && boss_word_lengths[legal] <= usable) { ++legal; }
    p.word_length = boss_word_lengths[uniform_index(rng, legal)];
    p.alphabet = boss_alphabet_size;
    return p;
  }

  std::size_t MCBTable::symbol(std::size_t position, double value) const {
    const auto& row = boundaries[position];
    std::size_t s = 0;
    while (s < row.size() && value > row[s]) { ++s; }
    return s;
  }

  MCBTable fit_mcb(std::span<const std::vector<double>> columns, std::size_t alphabet) {
    if (alphabet < 2) { throw Error("MCB alphabet size must be at least 2"); }
    MCBTable table;
    table.boundaries.reserve(columns.size());
    std::vector<double> work;
    for (const auto& column : columns) {
      if (column.empty()) { throw Error("MCB fitting needs at least one sample per position"); }
      work.assign(column.begin(), column.end());
      const std::size_t n = work.size();
      std::vector<double> row(alphabet - 1);
      auto begin = work.begin();
      for (std::size_t k = 1; k < alphabet; ++k) {
        // smallest sample whose empirical CDF reaches k/alphabet
        const std::size_t rank = (k * n + alphabet - 1) / alphabet - 1;
        const auto nth = work.begin() + static_cast<std::ptrdiff_t>(rank);
        std::nth_element(begin, nth, work.end());
        row[k - 1] = *nth;
        begin = nth;
      }
      table.boundaries.push_back(std::move(row));
    }
    return table;
  }

  std::vector<double> sfa_coefficients(std::span<const double> window, std::size_t f, bool norm) {
    if (f > usable_coefficients(window.size(), norm)) {
      throw Error("word length " + std::to_string(f) + " too large for a window of " + std::to_string(window.size()));
    }
    std::vector<double> out(f);
    dft_coefficients(window, f, norm ? 1 : 0, Twiddles(window.size()), out.data());
    return out;
  }

  std::vector<double> sliding_coefficients(std::span<const double> series, const BossParams& p) {
    validate(p, series.size());
    const std::size_t w = p.window;
    const std::size_t f = p.word_length;
    const std::size_t windows = series.size() - w + 1;
    const std::size_t first_bin = p.norm ? 1 : 0;
    std::vector<double> out(windows * f);
    const Twiddles tw(w);

    if (w <= boss_mft_threshold) {
      std::vector<double> scaled(w);
      for (std::size_t s = 0; s < windows; ++s) {
        const auto win = series.subspan(s, w);
        double mean = 0.0;
        for (double v : win) { mean += v; }
        mean /= static_cast<double>(w);
        double var = 0.0;
        for (double v : win) { var += (v - mean) * (v - mean); }
        const double sd = safe_stddev(var / static_cast<double>(w));
        for (std::size_t t = 0; t < w; ++t) { scaled[t] = win[t] / sd; }
        dft_coefficients(scaled, f, first_bin, tw, out.data() + s * f);
      }
      return out;
    }

    // Momentary Fourier transform: X_k(s+1) = (X_k(s) - x_s + x_{s+w}) e^{2 pi i k / w}
    const std::size_t bins = (f + 1) / 2;
    std::vector<double> re(bins, 0.0);
    std::vector<double> im(bins, 0.0);
    std::vector<double> rot_re(bins);
    std::vector<double> rot_im(bins);
    {
      std::vector<double> raw(2 * bins);
      dft_coefficients(series.first(w), 2 * bins, first_bin, tw, raw.data());
      for (std::size_t b = 0; b < bins; ++b) {
        re[b] = raw[2 * b];
        im[b] = raw[2 * b + 1];
        const std::size_t k = (first_bin + b) % w;
        rot_re[b] = tw.cos_table[k];
        rot_im[b] = tw.sin_table[k];
      }
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t t = 0; t < w; ++t) {
      sum += series[t];
      sum_sq += series[t] * series[t];
    }
    const double wd = static_cast<double>(w);
    for (std::size_t s = 0;; ++s) {
      const double mean = sum / wd;
      const double sd = safe_stddev(sum_sq / wd - mean * mean);
      double* row = out.data() + s * f;
      for (std::size_t idx = 0; idx < f; ++idx) {
        row[idx] = (idx % 2 == 0 ? re[idx / 2] : im[idx / 2]) / sd;
      }
      if (s + 1 == windows) { break; }
      const double leaving = series[s];
      const double entering = series[s + w];
      for (std::size_t b = 0; b < bins; ++b) {
        const double r = re[b] - leaving + entering;
        const double i = im[b];
        re[b] = r * rot_re[b] - i * rot_im[b];
        im[b] = r * rot_im[b] + i * rot_re[b];
      }
      sum += entering - leaving;
      sum_sq += entering * entering - leaving * leaving;
    }
    return out;
  }

  std::uint32_t quantize_word(std::span<const double> coefficients, const MCBTable& mcb, std::size_t alphabet) {
    std::uint32_t word = 0;
    for (std::size_t pos = 0; pos < coefficients.size(); ++pos) {
      word = word * static_cast<std::uint32_t>(alphabet) + static_cast<std::uint32_t>(mcb.symbol(pos, coefficients[pos]));
    }
    return word;
  }

  WordHistogram WordHistogram::from_words(std::vector<std::uint32_t> words) {
    std::sort(words.begin(), words.end());
    WordHistogram h;
    for (std::uint32_t w : words) {
      if (!h.entries_.empty() && h.entries_.back().word == w) {
        ++h.entries_.back().count;
      } else {
        h.entries_.push_back({w, 1});
      }
    }
    return h;
  }

  WordHistogram WordHistogram::from_entries(std::vector<WordCount> entries) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].count == 0) { throw Error("word histogram counts must be positive"); }
      if (i > 0 && entries[i - 1].word >= entries[i].word) { throw Error("word histogram entries must be sorted"); }
    }
    WordHistogram h;
    h.entries_ = std::move(entries);
    return h;
  }

  std::uint32_t WordHistogram::count(std::uint32_t word) const {
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), word,
                                     [](const WordCount& e, std::uint32_t w) { return e.word < w; });
    return it != entries_.end() && it->word == word ? it->count : 0;
  }

  std::size_t WordHistogram::total() const {
    std::size_t t = 0;
    for (const auto& e : entries_) { t += e.count; }
    return t;
  }

  std::vector<std::uint32_t> series_words(std::span<const double> series, const BossParams& params,
                                          const MCBTable& mcb) {
    if (series.size() < params.window) {
      throw Error("series of length " + std::to_string(series.size()) + " is shorter than BOSS window "
                  + std::to_string(params.window));
    }
    if (mcb.positions() != params.word_length) { throw Error("MCB table does not match the BOSS word length"); }
    const auto coefs = sliding_coefficients(series, params);
    const std::size_t f = params.word_length;
    const std::size_t windows = coefs.size() / f;
    std::vector<std::uint32_t> words;
    for (std::size_t s = 0; s < windows; ++s) {
      const auto word = quantize_word(std::span(coefs).subspan(s * f, f), mcb, params.alphabet);
      if (!words.empty() && words.back() == word) { continue; }
      words.push_back(word);
    }
    return words;
  }

  WordHistogram transform_series(std::span<const double> series, const BossParams& params, const MCBTable& mcb) {
    return WordHistogram::from_words(series_words(series, params, mcb));
  }

  double boss_dist(HistogramView a, HistogramView b, double cutoff) {
    double d = 0.0;
    std::size_t j = 0;
    for (const auto& e : a) {
      while (j < b.size() && b[j].word < e.word) { ++j; }
      const double other = (j < b.size() && b[j].word == e.word) ? static_cast<double>(b[j].count) : 0.0;
      const double diff = static_cast<double>(e.count) - other;
      d += diff * diff;
      if (d > cutoff) { return std::numeric_limits<double>::infinity(); }
    }
    return d;
  }

  BossTransform::BossTransform(BossParams params, MCBTable mcb) : params_(params), mcb_(std::move(mcb)) {
    if (mcb_.positions() != params_.word_length) { throw Error("MCB table does not match the BOSS word length"); }
    for (const auto& row : mcb_.boundaries) {
      if (row.size() + 1 != params_.alphabet) { throw Error("MCB row does not match the BOSS alphabet"); }
    }
  }

  BossTransform BossTransform::fit(const LabeledDataset& data, const BossParams& params) {
    validate(params, data.series_length());
    const std::size_t f = params.word_length;
    std::vector<std::vector<double>> coefficients;
    coefficients.reserve(data.size());
    std::size_t windows_total = 0;
    for (const auto& s : data.all_series()) {
      coefficients.push_back(sliding_coefficients(s.values(), params));
      windows_total += coefficients.back().size() / f;
    }
    std::vector<std::vector<double>> columns(f);
    for (auto& c : columns) { c.reserve(windows_total); }
    for (const auto& rows : coefficients) {
      for (std::size_t i = 0; i < rows.size(); ++i) { columns[i % f].push_back(rows[i]); }
    }
    BossTransform tr(params, fit_mcb(columns, params.alphabet));
    columns.clear();
    columns.shrink_to_fit();

    tr.offsets_.reserve(data.size() + 1);
    std::vector<std::uint32_t> words;
    for (const auto& rows : coefficients) {
      words.clear();
      const std::size_t windows = rows.size() / f;
      for (std::size_t s = 0; s < windows; ++s) {
        const auto word = quantize_word(std::span(rows).subspan(s * f, f), tr.mcb_, params.alphabet);
        if (!words.empty() && words.back() == word) { continue; }
        words.push_back(word);
      }
      const auto h = WordHistogram::from_words(words);
      tr.entries_.insert(tr.entries_.end(), h.view().begin(), h.view().end());
      tr.offsets_.push_back(tr.entries_.size());
    }
    tr.entries_.shrink_to_fit();
    return tr;
  }

  HistogramView BossTransform::histogram(std::size_t i) const {
    if (i + 1 >= offsets_.size()) { throw Error("BOSS transform holds no histogram for instance " + std::to_string(i)); }
    return HistogramView(entries_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
  }

  WordHistogram BossTransform::transform(std::span<const double> series) const {
    return transform_series(series, params_, mcb_);
  }

  std::vector<BossTransform> precompute_transforms(const LabeledDataset& data, std::size_t t, Rng& rng,
                                                   std::size_t threads) {
    if (data.series_length() < boss_min_window) { throw Error("series too short for BOSS"); }
    if (t == 0) { throw ConfigError("BOSS pool size t must be at least 1"); }
    std::vector<BossParams> params(t);
    for (auto& p : params) { p = sample_boss_params(rng, data.series_length()); }
    std::vector<std::optional<BossTransform>> slots(t);
    parallel_for(t, threads, [&](std::size_t i) { slots[i].emplace(BossTransform::fit(data, params[i])); });
    std::vector<BossTransform> pool;
    pool.reserve(t);
    for (auto& s : slots) { pool.push_back(std::move(*s)); }
    return pool;
  }

} // namespace tschief
