#include <tschief/io.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

namespace tschief {

  namespace {

    std::vector<std::string_view> split_fields(std::string_view line, bool comma) {
      std::vector<std::string_view> fields;
      std::size_t pos = 0;
      if (comma) {
        while (true) {
          const std::size_t end = line.find(',', pos);
          auto field = line.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
          const auto first = field.find_first_not_of(" \t\r");
          const auto last = field.find_last_not_of(" \t\r");
          fields.push_back(first == std::string_view::npos ? std::string_view{}
                                                           : field.substr(first, last - first + 1));
          if (end == std::string_view::npos) { break; }
          pos = end + 1;
        }
        return fields;
      }
      while (pos < line.size()) {
        const std::size_t start = line.find_first_not_of(" \t\r", pos);
        if (start == std::string_view::npos) { break; }
        const std::size_t end = line.find_first_of(" \t\r", start);
        fields.push_back(line.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        pos = end == std::string_view::npos ? line.size() : end;
      }
      return fields;
    }

    double parse_number(std::string_view field, const std::string& source, std::size_t row) {
      std::string_view text = field;
      if (!text.empty() && text.front() == '+') { text.remove_prefix(1); }
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(source + ": non-numeric field '" + std::string(field) + "' at row " + std::to_string(row));
      }
      return value;
    }

    std::int64_t parse_label(std::string_view field, const std::string& source, std::size_t row) {
      const double value = parse_number(field, source, row);
      if (!std::isfinite(value) || value != std::floor(value) || std::abs(value) > 9.0e15) {
        throw Error(source + ": label '" + std::string(field) + "' at row " + std::to_string(row)
                    + " is not an integer");
      }
      return static_cast<std::int64_t>(value);
    }

  } // namespace

  LabelMap::LabelMap(std::vector<std::int64_t> originals) : originals_(std::move(originals)) {
    std::sort(originals_.begin(), originals_.end());
    if (std::adjacent_find(originals_.begin(), originals_.end()) != originals_.end()) {
      throw Error("label map holds a duplicate label");
    }
  }

  Label LabelMap::index_of(std::int64_t original) const {
    const auto it = std::lower_bound(originals_.begin(), originals_.end(), original);
    if (it == originals_.end() || *it != original) {
      throw Error("label " + std::to_string(original) + " does not occur in the training labels");
    }
    return static_cast<Label>(it - originals_.begin());
  }

  std::int64_t LabelMap::original(Label index) const {
    if (index >= originals_.size()) { throw Error("class index out of range"); }
    return originals_[index];
  }

  LoadedDataset parse_ucr(std::istream& in, const std::string& source, const LabelMap* labels, bool znorm) {
    std::vector<std::string> lines;
    bool comma = false;
    for (std::string line; std::getline(in, line);) {
      if (line.find(',') != std::string::npos) { comma = true; }
      lines.push_back(std::move(line));
    }
    std::vector<std::vector<double>> rows;
    std::vector<std::int64_t> raw_labels;
    std::size_t width = 0;
    for (std::size_t r = 0; r < lines.size(); ++r) {
      const std::size_t row = r + 1;
      if (lines[r].find_first_not_of(" \t\r") == std::string::npos) { continue; }
      const auto fields = split_fields(lines[r], comma);
      if (fields.size() < 3) {
        throw Error(source + ": row " + std::to_string(row) + " needs a label and at least 2 values");
      }
      if (width == 0) {
        width = fields.size();
      } else if (fields.size() != width) {
        throw Error(source + ": ragged row " + std::to_string(row) + " has " + std::to_string(fields.size() - 1)
                    + " values, expected " + std::to_string(width - 1));
      }
      raw_labels.push_back(parse_label(fields[0], source, row));
      std::vector<double> values(fields.size() - 1);
      for (std::size_t j = 1; j < fields.size(); ++j) {
        values[j - 1] = parse_number(fields[j], source, row);
        if (!std::isfinite(values[j - 1])) {
          throw Error(source + ": non-finite value at row " + std::to_string(row));
        }
      }
      rows.push_back(std::move(values));
    }
    if (rows.empty()) { throw Error(source + ": empty file"); }

    LabelMap map = labels ? *labels : LabelMap([&] {
      auto distinct = raw_labels;
      std::sort(distinct.begin(), distinct.end());
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      return distinct;
    }());
    std::vector<Label> mapped(raw_labels.size());
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
      try {
        mapped[i] = map.index_of(raw_labels[i]);
      } catch (const Error& e) {
        throw Error(source + ": " + e.what());
      }
    }
    std::vector<TimeSeries> series;
    series.reserve(rows.size());
    for (auto& values : rows) { series.emplace_back(znorm ? znormalize(values) : std::move(values)); }
    const std::size_t classes = map.size();
    return {LabeledDataset(std::move(series), std::move(mapped), classes), std::move(map)};
  }

  LoadedDataset load_ucr_file(const std::filesystem::path& path, const LabelMap* labels, bool znorm) {
    std::ifstream in(path);
    if (!std::filesystem::is_regular_file(path) || !in) { throw Error("file not found: " + path.string()); }
    return parse_ucr(in, path.string(), labels, znorm);
  }

  LabeledDataset stratified_subsample(const LabeledDataset& data, std::size_t size, Rng& rng) {
    const std::size_t n = data.size();
    const std::size_t classes = data.class_count();
    if (size > n) {
      throw Error("subsample size " + std::to_string(size) + " exceeds the dataset size " + std::to_string(n));
    }
    std::vector<std::vector<std::size_t>> members(classes);
    for (std::size_t i = 0; i < n; ++i) { members[data.label(i)].push_back(i); }
    std::size_t present = 0;
    for (const auto& m : members) { present += m.empty() ? 0 : 1; }
    if (size < present) {
      throw Error("subsample size " + std::to_string(size) + " is below the class count " + std::to_string(present));
    }

    std::vector<std::size_t> quota(classes, 0);
    std::vector<double> exact(classes, 0.0);
    std::size_t total = 0;
    for (std::size_t c = 0; c < classes; ++c) {
      if (members[c].empty()) { continue; }
      exact[c] = static_cast<double>(size) * static_cast<double>(members[c].size()) / static_cast<double>(n);
      quota[c] = std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(exact[c])), 1, members[c].size());
      total += quota[c];
    }
    while (total > size) {
      std::size_t pick = classes;
      for (std::size_t c = 0; c < classes; ++c) {
        if (quota[c] <= 1) { continue; }
        if (pick == classes || static_cast<double>(quota[c]) - exact[c] > static_cast<double>(quota[pick]) - exact[pick]) {
          pick = c;
        }
      }
      --quota[pick];
      --total;
    }
    while (total < size) {
      std::size_t pick = classes;
      for (std::size_t c = 0; c < classes; ++c) {
        if (quota[c] >= members[c].size()) { continue; }
        if (pick == classes || exact[c] - static_cast<double>(quota[c]) > exact[pick] - static_cast<double>(quota[pick])) {
          pick = c;
        }
      }
      ++quota[pick];
      ++total;
    }

    std::vector<std::size_t> chosen;
    chosen.reserve(size);
    for (std::size_t c = 0; c < classes; ++c) {
      auto& m = members[c];
      for (std::size_t p = 0; p < quota[c]; ++p) { std::swap(m[p], m[p + uniform_index(rng, m.size() - p)]); }
      chosen.insert(chosen.end(), m.begin(), m.begin() + static_cast<std::ptrdiff_t>(quota[c]));
    }
    for (std::size_t i = chosen.size(); i > 1; --i) { std::swap(chosen[i - 1], chosen[uniform_index(rng, i)]); }
    return data.subset(chosen);
  }

  LabeledDataset synthetic_dataset(std::size_t size, std::size_t length, std::size_t classes, std::uint64_t seed) {
    if (classes == 0 || size < classes) { throw Error("synthetic dataset needs at least one instance per class"); }
    if (length < 2) { throw Error("synthetic series need at least 2 values"); }
    Rng rng = derive_stream(seed, streams::synthetic);
    std::vector<Label> labels(size);
    for (std::size_t i = 0; i < size; ++i) { labels[i] = static_cast<Label>(i % classes); }
    for (std::size_t i = size; i > 1; --i) { std::swap(labels[i - 1], labels[uniform_index(rng, i)]); }
    std::normal_distribution<double> noise(0.0, 0.5);
    std::vector<TimeSeries> series;
    series.reserve(size);
    const double len = static_cast<double>(length);
    for (std::size_t i = 0; i < size; ++i) {
      const double freq = 1.0 + static_cast<double>(labels[i]);
      const double phase = uniform_real(rng, 0.0, 2.0 * std::numbers::pi);
      std::vector<double> x(length);
      for (std::size_t j = 0; j < length; ++j) {
        x[j] = std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(j) / len + phase) + noise(rng);
      }
      series.emplace_back(znormalize(x));
    }
    return LabeledDataset(std::move(series), std::move(labels), classes);
  }

  std::string format_results_row(const ResultsRecord& r) {
    std::ostringstream row;
    row << r.dataset << ',' << r.n_train << ',' << r.n_test << ',' << r.series_length << ',' << r.classes << ','
        << r.config.k << ',' << r.config.t << ',' << r.config.Ce << ',' << r.config.Cb << ',' << r.config.Cr << ','
        << r.config.seed << ',' << std::fixed << std::setprecision(6) << r.accuracy << ',' << r.train_seconds << ','
        << r.test_seconds << ',' << r.nodes_by_type[0] << ',' << r.nodes_by_type[1] << ',' << r.nodes_by_type[2];
    return row.str();
  }

  void write_results(std::span<const ResultsRecord> records, const std::filesystem::path& path) {
    for (const auto& r : records) {
      if (!(r.accuracy >= 0.0 && r.accuracy <= 1.0)) { throw Error("accuracy outside [0, 1]"); }
      if (r.train_seconds < 0.0 || r.test_seconds < 0.0) { throw Error("negative duration in results record"); }
    }
    std::error_code ec;
    const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out) { throw Error("cannot write results to " + path.string()); }
    if (fresh) { out << results_header << '\n' << std::flush; }
    for (const auto& r : records) { out << format_results_row(r) << '\n' << std::flush; }
    if (!out) { throw Error("cannot write results to " + path.string()); }
  }

} // namespace tschief
