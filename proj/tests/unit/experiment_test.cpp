#include <doctest.h>

#include <cstdlib>
#include <random>
#include <sstream>

#include "mlkfhe/dataset_io.hpp"
#include "mlkfhe/experiment.hpp"
#include "mlkfhe/synthetic.hpp"
#include "test_support.hpp"

using namespace mlkfhe;

namespace {

ExperimentConfig config_from(const std::string& text, const std::filesystem::path& base = ".") {
  std::istringstream in(text);
  return parse_config(in, base, "exp.cfg");
}

std::string config_error(const std::string& text) {
  try {
    config_from(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

AlgorithmSpec fast(AlgorithmKind kind, std::string name = {}) {
  AlgorithmSpec spec = default_algorithm(kind);
  if (!name.empty()) spec.name = std::move(name);
  spec.components = 2;
  spec.base.max_epochs = 40;
  spec.base.rff_dim = 16;
  return spec;
}

NamedDataset synthetic(std::string name, std::uint64_t seed, std::size_t n = 60) {
  SyntheticSpec spec;
  spec.instances = n;
  spec.features = 4;
  spec.labels = 3;
  spec.seed = seed;
  return {std::move(name), make_synthetic(spec)};
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("config grammar") {
  const auto c = config_from(
      "# benchmark\n"
      "seed = 42\nfolds = 3\nrepetitions = 1   # once\n"
      "output = out\ncontrol = ours\n"
      "dataset = /abs/flags.arff labels=7\n"
      "dataset = /abs/other.csv name=renamed\n"
      "algorithm = ours kfhe-homer components=25 kernel=radial\n"
      "algorithm = theirs ecc T=5 weighting=direct\n",
      "/base");
  CHECK(c.seed == 42);
  CHECK(c.folds == 3);
  CHECK(c.repetitions == 1);
  CHECK(c.output == std::filesystem::path("/base/out"));
  REQUIRE(c.datasets.size() == 2);
  CHECK(c.datasets[0].name == "flags");
  CHECK(c.datasets[0].label_count == 7u);
  CHECK(c.datasets[1].name == "renamed");
  CHECK_FALSE(c.datasets[1].label_count.has_value());
  REQUIRE(c.algorithms.size() == 2);
  CHECK(c.algorithms[0].kind == AlgorithmKind::kfhe_homer);
  CHECK(c.algorithms[0].components == 25);
  CHECK(c.algorithms[0].base.kernel == Kernel::radial);
  CHECK(c.algorithms[1].components == 5);
  CHECK(c.control_index() == 0);
}

TEST_CASE("config errors name the line") {
  CHECK(config_error("folds = 1\ndataset = /a.csv\nalgorithm = a cc\n").find("folds") != std::string::npos);
  CHECK(config_error("seed = x\n").rfind("exp.cfg:1:", 0) == 0);
  CHECK(config_error("dataset = /a.csv\nbogus = 1\n").rfind("exp.cfg:2:", 0) == 0);
  CHECK(config_error("dataset = /a.csv\nalgorithm = a ecc components=0\n").find("components") != std::string::npos);
  CHECK(config_error("dataset = /a.csv\nalgorithm = a nope\n").rfind("exp.cfg:2:", 0) == 0);
  CHECK_FALSE(config_error("dataset = /a.csv\nalgorithm = a cc\nalgorithm = a br\n").empty());
  CHECK_FALSE(config_error("dataset = /a.csv\nalgorithm = a cc\ncontrol = b\n").empty());
  CHECK_FALSE(config_error("algorithm = a cc\n").empty());
  CHECK_FALSE(config_error("dataset = /a.csv labels\nalgorithm = a cc\n").empty());
}

TEST_CASE("dataset paths fall back to the data directory") {
  const auto base = mlkfhe::testing::scratch_dir("resolve_base");
  const auto data = mlkfhe::testing::scratch_dir("resolve_data");
  mlkfhe::testing::write_file(data / "d.csv", "x\n");
  ::setenv("MLKFHE_DATA_DIR", data.c_str(), 1);
  CHECK(resolve_dataset_path("d.csv", base) == data / "d.csv");
  mlkfhe::testing::write_file(base / "d.csv", "x\n");
  CHECK(resolve_dataset_path("d.csv", base) == base / "d.csv");
  ::unsetenv("MLKFHE_DATA_DIR");
}

TEST_CASE("row counts, ordering and determinism") {
  ExperimentConfig config;
  config.folds = 5;
  config.repetitions = 2;
  config.seed = 9;
  config.algorithms = {fast(AlgorithmKind::cc)};
  const std::vector<NamedDataset> data{synthetic("s", 1)};
  const auto a = run_cv_experiment(data, config);
  REQUIRE(a.cells.size() == 10);
  CHECK(a.all_ok());
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(a.cells[i].repetition == i / 5);
    CHECK(a.cells[i].fold == i % 5);
  }
  const auto b = run_cv_experiment(data, config, {3});
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(a.cells[i].macro_f == b.cells[i].macro_f);
    CHECK(a.cells[i].hamming_loss == b.cells[i].hamming_loss);
  }
}

TEST_CASE("a constant predictor ranks below a learner on separable data") {
  // Each label is a sign of one input, so a linear model separates it while
  // the prior model predicts the majority class everywhere (macro-F of at
  // most 2/3 on a label whose positives are a minority).
  Matrix x(80, 3);
  LabelMatrix y(80, 3);
  std::mt19937 gen(1);
  std::normal_distribution<double> normal;
  for (Eigen::Index i = 0; i < 80; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      x(i, j) = normal(gen);
      y(i, j) = x(i, j) > 0.4 ? 1 : 0;
    }
  }
  ExperimentConfig config;
  config.folds = 4;
  config.repetitions = 1;
  auto learner = fast(AlgorithmKind::br);
  learner.base.max_epochs = 500;
  config.algorithms = {learner, fast(AlgorithmKind::constant)};
  const auto result = run_cv_experiment({{"sep", make_dataset(x, y)}}, config);
  double learner_f = 0.0, dummy_f = 0.0;
  for (const auto& c : result.cells) (c.algorithm == "br" ? learner_f : dummy_f) += c.macro_f;
  CHECK(learner_f > dummy_f);
}

TEST_CASE("cell seeds depend on every coordinate") {
  const auto base = cell_seed(1, "d", 0, 0, "a");
  CHECK(cell_seed(1, "d", 0, 0, "a") == base);
  CHECK(cell_seed(2, "d", 0, 0, "a") != base);
  CHECK(cell_seed(1, "e", 0, 0, "a") != base);
  CHECK(cell_seed(1, "d", 1, 0, "a") != base);
  CHECK(cell_seed(1, "d", 0, 1, "a") != base);
  CHECK(cell_seed(1, "d", 0, 0, "b") != base);
  CHECK(fold_seed(1, "d", 0) != fold_seed(1, "d", 1));
}

TEST_CASE("failed cells are recorded and the run continues") {
  // Three instances cannot be split into five folds.
  ExperimentConfig config;
  config.algorithms = {fast(AlgorithmKind::cc)};
  CHECK_THROWS(run_cv_experiment({synthetic("tiny", 2, 3)}, config));

  // A training error inside a cell.
  auto broken = fast(AlgorithmKind::br, "broken");
  broken.base.lambda = 0.0;
  config.algorithms = {fast(AlgorithmKind::cc), broken};
  config.repetitions = 1;
  const auto result = run_cv_experiment({synthetic("s", 3)}, config);
  CHECK_FALSE(result.all_ok());
  for (const auto& c : result.cells) {
    CHECK(c.ok == (c.algorithm == "cc"));
    if (!c.ok) CHECK_FALSE(c.error.empty());
  }
}

TEST_CASE("file-based experiment") {
  const auto dir = mlkfhe::testing::scratch_dir("experiment_files");
  save_csv(synthetic("a", 4).data, dir / "a.csv");
  mlkfhe::testing::write_file(dir / "exp.cfg",
                              "seed = 3\nfolds = 2\nrepetitions = 1\n"
                              "dataset = a.csv\nalgorithm = cc cc components=2 epochs=30\n");
  const auto config = load_config(dir / "exp.cfg");
  const auto result = run_cv_experiment(config);
  CHECK(result.cells.size() == 2);
  CHECK(result.datasets == std::vector<std::string>{"a"});
  CHECK_THROWS_AS(load_config(dir / "missing.cfg"), ConfigError);
}

}
