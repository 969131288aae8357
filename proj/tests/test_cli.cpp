#include <doctest.h>

#include "cli.hpp"

#include <tschief/io.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

  namespace fs = std::filesystem;

  struct Outcome {
    int code;
    std::string out;
    std::string err;
  };

  Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "tschief");
    std::vector<const char*> argv;
    for (const auto& a : args) { argv.push_back(a.c_str()); }
    std::ostringstream out;
    std::ostringstream err;
    const int code = tschief::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
  }

  fs::path work_dir() {
    const auto dir = fs::temp_directory_path() / "tschief_cli_tests";
    fs::create_directories(dir);
    return dir;
  }

  /// Writes a synthetic split in UCR format with labels 1..c.
  fs::path write_split(const std::string& name, std::size_t n, std::uint64_t seed) {
    const auto data = tschief::synthetic_dataset(n, 20, 2, seed);
    const auto path = work_dir() / name;
    std::ofstream out(path);
    for (std::size_t i = 0; i < data.size(); ++i) {
      out << data.label(i) + 1;
      for (double v : data.series(i).values()) { out << '\t' << v; }
      out << '\n';
    }
    return path;
  }

  std::size_t count_lines(const std::string& text, const std::string& prefix) {
    std::istringstream in(text);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) { n += line.starts_with(prefix) ? 1 : 0; }
    return n;
  }

  const std::vector<std::string> fast{"-k", "3", "-t", "4", "--Ce", "2", "--Cb", "4", "--Cr", "8", "--threads", "1"};

  std::vector<std::string> with_fast(std::vector<std::string> args) {
    args.insert(args.end(), fast.begin(), fast.end());
    return args;
  }

} // namespace

TEST_CASE("train writes a model that predict can use") {
  const auto train = write_split("Toy_TRAIN.tsv", 20, 1);
  const auto test = write_split("Toy_TEST.tsv", 10, 2);
  const auto model = work_dir() / "toy.tscf";
  fs::remove(model);
  const auto r = run(with_fast({"train", "--train", train.string(), "--out", model.string(), "--seed", "7"}));
  CHECK(r.code == 0);
  CHECK(fs::exists(model));
  CHECK(r.out.find("n=20") != std::string::npos);
  const auto p = run({"predict", "--model", model.string(), "--test", test.string()});
  CHECK(p.code == 0);
  CHECK(count_lines(p.out, "1") + count_lines(p.out, "2") == 10);
  CHECK(p.out.find("accuracy") != std::string::npos);
}

TEST_CASE("errors exit with status 2") {
  const auto train = write_split("Toy_TRAIN.tsv", 20, 1);
  const auto missing = run({"train", "--train", "/nonexistent/x.tsv", "--out", "/tmp/x.tscf"});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("file not found") != std::string::npos);
  const auto zero = run({"train", "--train", train.string(), "--out", "/tmp/x.tscf", "-k", "0"});
  CHECK(zero.code == 2);
  CHECK(zero.err.find("configuration error") != std::string::npos);
  CHECK(run({"nonsense"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"train", "--train", train.string()}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("eval runs one row per repeat and appends to the results file") {
  const auto train = write_split("Toy_TRAIN.tsv", 20, 1);
  const auto test = write_split("Toy_TEST.tsv", 10, 2);
  const auto results = work_dir() / "eval.csv";
  fs::remove(results);
  const auto r = run(with_fast({"eval", "--train", train.string(), "--test", test.string(), "--repeats", "3",
                                "--out", results.string()}));
  REQUIRE(r.code == 0);
  CHECK(count_lines(r.out, "Toy,") == 3);
  CHECK(count_lines(r.out, "mean accuracy") == 1);
  std::ifstream in(results);
  std::stringstream content;
  content << in.rdbuf();
  CHECK(count_lines(content.str(), "Toy,") == 3);
  CHECK(count_lines(content.str(), "dataset,") == 1);
}

TEST_CASE("ablate runs the seven splitter subsets") {
  const auto train = write_split("Toy_TRAIN.tsv", 20, 1);
  const auto test = write_split("Toy_TEST.tsv", 10, 2);
  const auto r = run(with_fast({"ablate", "--train", train.string(), "--test", test.string()}));
  REQUIRE(r.code == 0);
  CHECK(count_lines(r.out, "sim,Toy,") == 1);
  CHECK(count_lines(r.out, "dict,") == 1);
  CHECK(count_lines(r.out, "int,") == 1);
  CHECK(count_lines(r.out, "sim+dict+int,") == 1);
  std::istringstream in(r.out);
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.starts_with("arm,") || line.empty()) { continue; }
    ++rows;
    if (line.starts_with("sim,")) {
      // k,t,Ce,Cb,Cr = 3,4,2,0,0 and no dictionary or interval nodes
      CHECK(line.find(",3,4,2,0,0,") != std::string::npos);
      CHECK(line.ends_with(",0,0"));
    }
  }
  CHECK(rows == 7);
}

TEST_CASE("bench-scaling reports each size and the time ratio") {
  const auto train = write_split("Toy_TRAIN.tsv", 40, 3);
  const auto r = run(with_fast({"bench-scaling", "--train", train.string(), "--sizes", "10,20,40"}));
  REQUIRE(r.code == 0);
  CHECK(count_lines(r.out, "Toy,") == 3);
  CHECK(count_lines(r.out, "size,median_train_seconds,ratio_to_previous") == 1);
  CHECK(count_lines(r.out, "10,") == 1);
  const auto small = run(with_fast({"bench-scaling", "--train", train.string(), "--sizes", "1"}));
  CHECK(small.code == 2);
}
