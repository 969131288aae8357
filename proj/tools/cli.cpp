#include "cli.hpp"

#include <tschief/forest.hpp>
#include <tschief/io.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <optional>
#include <ostream>

namespace tschief::cli {

  namespace {

    struct Options {
      std::string train;
      std::string test;
      std::string out;
      std::string model;
      std::string name;
      std::vector<std::size_t> sizes;
      std::size_t repeats = 1;
      bool znorm = false;
      ForestConfig config;
    };

    void add_config_flags(CLI::App& cmd, Options& o) {
      cmd.add_option("-k", o.config.k, "Number of trees")->capture_default_str();
      cmd.add_option("-t", o.config.t, "BOSS transform pool size")->capture_default_str();
      cmd.add_option("--Ce", o.config.Ce, "Similarity candidates per node")->capture_default_str();
      cmd.add_option("--Cb", o.config.Cb, "Dictionary candidates per node")->capture_default_str();
      cmd.add_option("--Cr", o.config.Cr, "Interval candidates per node")->capture_default_str();
      cmd.add_option("--seed", o.config.seed, "Master seed")->capture_default_str();
      cmd.add_option("--threads", o.config.threads, "Worker threads (0 = all)")->capture_default_str();
      cmd.add_flag("--znorm", o.znorm, "Z-normalise every series at load");
    }

    double seconds_since(std::chrono::steady_clock::time_point start) {
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }

    std::string dataset_name(const Options& o) {
      if (!o.name.empty()) { return o.name; }
      auto stem = std::filesystem::path(o.train).stem().string();
      for (std::string_view suffix : {"_TRAIN", "_train"}) {
        if (stem.size() > suffix.size() && stem.ends_with(suffix)) { stem.resize(stem.size() - suffix.size()); }
      }
      return stem;
    }

    /// Trains on `train`, evaluates on `test`, and fills a results record.
    ResultsRecord train_and_evaluate(const LabeledDataset& train, const LabeledDataset& test,
                                     const ForestConfig& config, const std::string& name) {
      TrainingReport report;
      const auto start = std::chrono::steady_clock::now();
      const Forest forest = Forest::train(train, config, &report);
      const double train_seconds = seconds_since(start);
      const auto test_start = std::chrono::steady_clock::now();
      const auto ev = evaluate(forest, test, config.threads);
      ResultsRecord r;
      r.dataset = name;
      r.n_train = train.size();
      r.n_test = test.size();
      r.series_length = train.series_length();
      r.classes = train.class_count();
      r.config = config;
      r.accuracy = ev.accuracy;
      r.train_seconds = train_seconds;
      r.test_seconds = seconds_since(test_start);
      r.nodes_by_type = report.stats.nodes_by_type;
      return r;
    }

    void emit(const ResultsRecord& r, const Options& o, std::ostream& out) {
      out << format_results_row(r) << '\n' << std::flush;
      if (!o.out.empty()) { write_results(std::span(&r, 1), o.out); }
    }

    int cmd_train(const Options& o, std::ostream& out) {
      const auto train = load_ucr_file(o.train, nullptr, o.znorm);
      const auto start = std::chrono::steady_clock::now();
      Forest forest = Forest::train(train.data, o.config);
      const double seconds = seconds_since(start);
      forest.set_label_names(std::vector<std::int64_t>(train.labels.originals().begin(), train.labels.originals().end()));
      save_model(forest, std::filesystem::path(o.out));
      out << "trained n=" << train.data.size() << " length=" << train.data.series_length()
          << " classes=" << train.data.class_count() << " train_seconds=" << std::fixed << std::setprecision(3)
          << seconds << " model=" << o.out << '\n';
      return 0;
    }

    int cmd_eval(const Options& o, std::ostream& out) {
      const auto train = load_ucr_file(o.train, nullptr, o.znorm);
      const auto test = load_ucr_file(o.test, &train.labels, o.znorm);
      out << results_header << '\n';
      double sum = 0.0;
      for (std::size_t r = 0; r < o.repeats; ++r) {
        ForestConfig config = o.config;
        config.seed = o.config.seed + r;
        const auto record = train_and_evaluate(train.data, test.data, config, dataset_name(o));
        emit(record, o, out);
        sum += record.accuracy;
      }
      out << "mean accuracy " << std::fixed << std::setprecision(6) << sum / static_cast<double>(o.repeats) << '\n';
      return 0;
    }

    int cmd_bench_scaling(const Options& o, std::ostream& out) {
      if (o.sizes.empty()) { throw Error("--sizes needs at least one size"); }
      if (!std::is_sorted(o.sizes.begin(), o.sizes.end())) { throw Error("--sizes must be ascending"); }
      const auto train = load_ucr_file(o.train, nullptr, o.znorm);
      const auto test = o.test.empty() ? train : load_ucr_file(o.test, &train.labels, o.znorm);
      for (std::size_t size : o.sizes) {
        if (size < train.data.class_count()) {
          throw Error("size " + std::to_string(size) + " is below the class count "
                      + std::to_string(train.data.class_count()));
        }
      }
      out << results_header << '\n';
      std::vector<double> medians;
      for (std::size_t size : o.sizes) {
        std::vector<double> times;
        for (std::size_t r = 0; r < o.repeats; ++r) {
          ForestConfig config = o.config;
          config.seed = o.config.seed + r;
          Rng rng = derive_stream(config.seed, streams::subsample);
          const auto sample = stratified_subsample(train.data, size, rng);
          const auto record = train_and_evaluate(sample, test.data, config, dataset_name(o));
          emit(record, o, out);
          times.push_back(record.train_seconds);
        }
        std::nth_element(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(times.size() / 2), times.end());
        medians.push_back(times[times.size() / 2]);
      }
      out << "size,median_train_seconds,ratio_to_previous\n" << std::fixed << std::setprecision(6);
      for (std::size_t i = 0; i < medians.size(); ++i) {
        out << o.sizes[i] << ',' << medians[i] << ',';
        if (i > 0 && medians[i - 1] > 0.0) {
          out << medians[i] / medians[i - 1];
        } else {
          out << "NA";
        }
        out << '\n';
      }
      return 0;
    }

    int cmd_ablate(const Options& o, std::ostream& out) {
      const auto train = load_ucr_file(o.train, nullptr, o.znorm);
      const auto test = load_ucr_file(o.test, &train.labels, o.znorm);
      out << "arm," << results_header << '\n';
      for (std::size_t r = 0; r < o.repeats; ++r) {
        for (unsigned mask = 1; mask < 8; ++mask) {
          ForestConfig config = o.config;
          config.seed = o.config.seed + r;
          config.Ce = (mask & 1U) ? o.config.Ce : 0;
          config.Cb = (mask & 2U) ? o.config.Cb : 0;
          config.Cr = (mask & 4U) ? o.config.Cr : 0;
          std::string arm;
          for (auto [bit, label] : {std::pair{1U, "sim"}, std::pair{2U, "dict"}, std::pair{4U, "int"}}) {
            if (mask & bit) { arm += arm.empty() ? label : std::string("+") + label; }
          }
          const auto record = train_and_evaluate(train.data, test.data, config, dataset_name(o));
          out << arm << ',';
          emit(record, o, out);
        }
      }
      return 0;
    }

    int cmd_predict(const Options& o, std::ostream& out) {
      const Forest forest = load_model(std::filesystem::path(o.model));
      std::optional<LabelMap> map;
      if (!forest.label_names().empty()) {
        map.emplace(std::vector<std::int64_t>(forest.label_names().begin(), forest.label_names().end()));
      }
      const auto test = load_ucr_file(o.test, map ? &*map : nullptr, o.znorm);
      const auto ev = evaluate(forest, test.data, o.config.threads);
      for (Label l : ev.predictions) { out << (map ? map->original(l) : static_cast<std::int64_t>(l)) << '\n'; }
      out << "accuracy " << std::fixed << std::setprecision(6) << ev.accuracy << '\n';
      return 0;
    }

  } // namespace

  int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Time-series classification forest with similarity, dictionary and interval splitters", "tschief"};
    app.require_subcommand(1, 1);
    Options o;

    auto* train = app.add_subcommand("train", "Train a forest and save it");
    train->add_option("--train", o.train, "Training file")->required();
    train->add_option("--out", o.out, "Model output path")->required();
    add_config_flags(*train, o);

    auto* eval = app.add_subcommand("eval", "Train and evaluate on a train/test split");
    eval->add_option("--train", o.train, "Training file")->required();
    eval->add_option("--test", o.test, "Test file")->required();
    eval->add_option("--out", o.out, "Results CSV to append to");
    eval->add_option("--repeats", o.repeats, "Runs with seeds seed..seed+repeats-1")->check(CLI::PositiveNumber);
    eval->add_option("--name", o.name, "Dataset name in the results");
    add_config_flags(*eval, o);

    auto* bench = app.add_subcommand("bench-scaling", "Training time against stratified subsample size");
    bench->add_option("--train", o.train, "Training file")->required();
    bench->add_option("--test", o.test, "Test file (defaults to the training file)");
    bench->add_option("--sizes", o.sizes, "Ascending subsample sizes")->required()->delimiter(',');
    bench->add_option("--out", o.out, "Results CSV to append to");
    bench->add_option("--repeats", o.repeats, "Runs per size")->check(CLI::PositiveNumber);
    bench->add_option("--name", o.name, "Dataset name in the results");
    add_config_flags(*bench, o);

    auto* ablate = app.add_subcommand("ablate", "Evaluate every non-empty subset of splitter types");
    ablate->add_option("--train", o.train, "Training file")->required();
    ablate->add_option("--test", o.test, "Test file")->required();
    ablate->add_option("--out", o.out, "Results CSV to append to");
    ablate->add_option("--repeats", o.repeats, "Runs per arm")->check(CLI::PositiveNumber);
    ablate->add_option("--name", o.name, "Dataset name in the results");
    add_config_flags(*ablate, o);

    auto* predict = app.add_subcommand("predict", "Classify a file with a saved model");
    predict->add_option("--model", o.model, "Model file")->required();
    predict->add_option("--test", o.test, "File to classify")->required();
    predict->add_option("--threads", o.config.threads, "Worker threads (0 = all)");
    predict->add_flag("--znorm", o.znorm, "Z-normalise every series at load");

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? 0 : 2;
    }

    try {
      if (*predict) { return cmd_predict(o, out); }
      o.config.validate();
      if (*train) { return cmd_train(o, out); }
      if (*eval) { return cmd_eval(o, out); }
      if (*bench) { return cmd_bench_scaling(o, out); }
      if (*ablate) { return cmd_ablate(o, out); }
    } catch (const ConfigError& e) {
      err << "configuration error: " << e.what() << '\n';
      return 2;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return 2;
    }
    return 2;
  }

} // namespace tschief::cli
