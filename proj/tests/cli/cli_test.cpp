#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <sstream>

#include "mlkfhe/dataset_io.hpp"
#include "mlkfhe/serialization.hpp"
#include "mlkfhe/synthetic.hpp"
#include "mlkfhe/text.hpp"
#include "test_support.hpp"

using namespace mlkfhe;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string("\"") + MLKFHE_CLI_PATH + "\" " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

fs::path toy_csv(const fs::path& dir, const std::string& name, std::uint64_t seed,
                 std::size_t n = 80) {
  SyntheticSpec spec;
  spec.instances = n;
  spec.features = 5;
  spec.labels = 4;
  spec.seed = seed;
  const auto path = dir / (name + ".csv");
  save_csv(make_synthetic(spec), path);
  return path;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line.rfind("# ", 0) == 0) continue;
    rows.push_back(*split_csv_record(line));
  }
  return rows;
}

std::string strip_header(const std::string& text) {
  std::istringstream in(text);
  std::string out;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("# ", 0) != 0) out += line + '\n';
  }
  return out;
}

}  // namespace

TEST_CASE("usage errors exit with status 2") {
  const auto dir = mlkfhe::testing::scratch_dir("cli_usage");
  const auto data = toy_csv(dir, "toy", 1);
  CHECK(run("train " + q(data) + " --components 0 -o " + q(dir / "m.txt")).status == 2);
  CHECK(run("train " + q(data) + " --family forest -o " + q(dir / "m.txt")).status == 2);
  CHECK(run("train " + q(data) + " --bogus").status == 2);
  CHECK(run("train " + q(dir / "missing.csv")).status == 2);
  CHECK(run("").status == 2);
  CHECK(run("predict " + q(data)).status == 2);
  CHECK_FALSE(fs::exists(dir / "m.txt"));
}

TEST_CASE("train writes a model and a ten-row log") {
  const auto dir = mlkfhe::testing::scratch_dir("cli_train");
  const auto data = toy_csv(dir, "toy", 2);
  const std::string args =
      "train " + q(data) + " --family kfhe-homer --components 10 --seed 7 -o " + q(dir / "m.txt");
  REQUIRE(run(args).status == 0);
  const auto log = csv_rows(mlkfhe::testing::read_file(dir / "m.txt.log.csv"));
  REQUIRE(log.size() == 11);
  CHECK(log[0] == std::vector<std::string>{"t", "r", "k", "p", "k_w", "p_w"});
  for (std::size_t t = 1; t <= 10; ++t) {
    CHECK(log[t][0] == std::to_string(t));
    const double k = *parse_double(log[t][2]);
    CHECK(k >= 0.0);
    CHECK(k <= 1.0);
  }
  const std::string first = mlkfhe::testing::read_file(dir / "m.txt");
  REQUIRE(run(args).status == 0);
  CHECK(mlkfhe::testing::read_file(dir / "m.txt") == first);
  CHECK(first.find("# seed 7\n") != std::string::npos);
}

TEST_CASE("predict matches in-process prediction") {
  const auto dir = mlkfhe::testing::scratch_dir("cli_predict");
  const auto data = toy_csv(dir, "toy", 3);
  for (const std::string family : {"kfhe-cc", "ehomer"}) {
    REQUIRE(run("train " + q(data) + " --family " + family + " -T 4 --kernel radial -o " +
                q(dir / "m.txt"))
                .status == 0);
    const auto out = run("predict -m " + q(dir / "m.txt") + " " + q(data));
    REQUIRE(out.status == 0);
    const auto rows = csv_rows(out.out);
    const auto model = load_model(dir / "m.txt");
    const auto dataset = load_dataset(data);
    const ScoreMatrix expected = predict_scores(model, dataset.features);
    REQUIRE(rows.size() == dataset.size() + 1);
    CHECK(rows[0] == dataset.label_names);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      for (std::size_t j = 0; j < dataset.num_labels(); ++j) {
        CHECK(std::abs(*parse_double(rows[i + 1][j]) -
                       expected(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) <= 1e-12);
      }
    }
    const auto decisions = csv_rows(run("predict --decisions -m " + q(dir / "m.txt") + " " + q(data)).out);
    CHECK(decisions[1][0] == (expected(0, 0) >= 0.5 ? "1" : "0"));
  }
  mlkfhe::testing::write_file(dir / "narrow.csv", "a,b,label:x,label:y\n1,2,0,1\n");
  CHECK(run("predict -m " + q(dir / "m.txt") + " " + q(dir / "narrow.csv")).status == 2);
}

TEST_CASE("evaluate reports metrics") {
  const auto dir = mlkfhe::testing::scratch_dir("cli_evaluate");
  const auto data = toy_csv(dir, "toy", 4);
  REQUIRE(run("train " + q(data) + " --family br -o " + q(dir / "m.txt")).status == 0);
  const auto out = run("evaluate -m " + q(dir / "m.txt") + " " + q(data) + " -o " + q(dir / "e.csv"));
  REQUIRE(out.status == 0);
  CHECK(out.out.find("macro_f") != std::string::npos);
  CHECK(fs::exists(dir / "e.csv"));
}

TEST_CASE("dataset-info on the hand fixture") {
  const auto dir = mlkfhe::testing::scratch_dir("cli_info");
  const auto out = run("dataset-info " + q(mlkfhe::testing::data_dir() / "hand_fixture.arff") +
                       " --labels 4 -o " + q(dir / "info.csv"));
  REQUIRE(out.status == 0);
  CHECK(out.out.find("cardinality  2.000") != std::string::npos);
  const auto rows = csv_rows(mlkfhe::testing::read_file(dir / "info.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[1] == std::vector<std::string>{"hand_fixture", "6", "5", "4", "2", "2.4375"});
}

TEST_CASE("benchmark and stats") {
  const auto dir = mlkfhe::testing::scratch_dir("cli_benchmark");
  toy_csv(dir, "first", 5, 60);
  toy_csv(dir, "second", 6, 60);
  mlkfhe::testing::write_file(dir / "bench.cfg",
                              "seed = 11\nfolds = 5\nrepetitions = 2\noutput = out\n"
                              "dataset = first.csv\ndataset = second.csv\n"
                              "algorithm = kfhe-cc kfhe-cc components=3 epochs=80\n"
                              "algorithm = ecc ecc components=3 epochs=80\n"
                              "algorithm = br br epochs=80\n");
  const auto out = run("benchmark " + q(dir / "bench.cfg") + " --jobs 2");
  REQUIRE(out.status == 0);
  CHECK(out.out.find("Avg. rank") != std::string::npos);
  const auto results = csv_rows(mlkfhe::testing::read_file(dir / "out" / "results.csv"));
  CHECK(results.size() == 60 + 1);
  const auto stats_text = mlkfhe::testing::read_file(dir / "out" / "stats.csv");
  std::size_t wilcoxon = 0;
  for (const auto& row : csv_rows(stats_text)) wilcoxon += row[0] == "wilcoxon";
  CHECK(wilcoxon == 2 * 3);

  REQUIRE(run("stats " + q(dir / "out" / "results.csv") + " -o " + q(dir / "restat")).status == 0);
  CHECK(strip_header(mlkfhe::testing::read_file(dir / "restat" / "stats.csv")) == strip_header(stats_text));
  CHECK(run("stats " + q(dir / "out" / "results.csv") + " --control nope").status == 2);

  mlkfhe::testing::write_file(dir / "bad.cfg", "folds = 5\ndataset = first.csv\nalgorithm = x nope\n");
  CHECK(run("benchmark " + q(dir / "bad.cfg")).status == 2);
  toy_csv(dir, "tiny", 7, 3);
  mlkfhe::testing::write_file(dir / "tiny.cfg", "dataset = tiny.csv\nalgorithm = br br\n");
  CHECK(run("benchmark " + q(dir / "tiny.cfg")).status != 0);
}
