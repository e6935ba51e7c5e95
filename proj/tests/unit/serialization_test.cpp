#include <doctest.h>

#include <sstream>

#include "mlkfhe/serialization.hpp"
#include "test_support.hpp"

using namespace mlkfhe;

namespace {

AlgorithmSpec quick(AlgorithmKind kind) {
  AlgorithmSpec spec = default_algorithm(kind);
  spec.components = 3;
  spec.base.max_epochs = 60;
  spec.base.rff_dim = 24;
  return spec;
}

std::string to_text(const TrainedAlgorithm& model, const std::vector<std::string>& header = {}) {
  std::ostringstream out;
  save_model(model, out, header);
  return out.str();
}

TrainedAlgorithm from_text(const std::string& text) {
  std::istringstream in(text);
  return load_model(in);
}

}  // namespace

TEST_SUITE("serialization") {

TEST_CASE("every model kind round-trips bit-identically") {
  auto data = mlkfhe::testing::random_dataset(40, 3, 5, 21);
  data.label_names[2] = "two words,%odd";
  for (AlgorithmKind kind : {AlgorithmKind::kfhe_homer, AlgorithmKind::kfhe_cc, AlgorithmKind::ehomer,
                             AlgorithmKind::ecc, AlgorithmKind::homer, AlgorithmKind::cc,
                             AlgorithmKind::br, AlgorithmKind::constant}) {
    for (Kernel kernel : {Kernel::linear, Kernel::radial}) {
      auto spec = quick(kind);
      spec.base.kernel = kernel;
      const auto trained = train_algorithm(data, spec, 5);
      const std::string text = to_text(trained);
      const auto loaded = from_text(text);
      CAPTURE(to_string(kind));
      CHECK(predict_scores(loaded, data.features) == predict_scores(trained, data.features));
      CHECK(loaded.label_names == trained.label_names);
      CHECK(loaded.seed == trained.seed);
      CHECK(loaded.spec.name == trained.spec.name);
      CHECK(to_text(loaded) == text);
      if (kind == AlgorithmKind::kfhe_homer || kind == AlgorithmKind::kfhe_cc) {
        REQUIRE(loaded.log.size() == trained.log.size());
        for (std::size_t t = 0; t < loaded.log.size(); ++t) {
          CHECK(loaded.log[t].model_gain == trained.log[t].model_gain);
        }
        CHECK(std::get<KfheModel>(loaded.model).gains == std::get<KfheModel>(trained.model).gains);
      }
    }
  }
}

TEST_CASE("header lines are comments") {
  const auto data = mlkfhe::testing::random_dataset(20, 2, 3, 1);
  const auto trained = train_algorithm(data, quick(AlgorithmKind::cc), 2);
  const std::string text = to_text(trained, {"mlkfhe 0.1.0", "seed 2"});
  CHECK(text.rfind("# mlkfhe 0.1.0\n# seed 2\n", 0) == 0);
  CHECK(predict_scores(from_text(text), data.features) == predict_scores(trained, data.features));
}

TEST_CASE("file round trip") {
  const auto data = mlkfhe::testing::random_dataset(20, 2, 3, 2);
  const auto trained = train_algorithm(data, quick(AlgorithmKind::ehomer), 3);
  const auto path = mlkfhe::testing::scratch_dir("serialization") / "model.txt";
  save_model(trained, path);
  CHECK(predict_scores(load_model(path), data.features) == predict_scores(trained, data.features));
  CHECK_THROWS_AS(load_model(path.parent_path() / "missing.txt"), SerializationError);
}

TEST_CASE("corrupt containers are rejected") {
  const auto data = mlkfhe::testing::random_dataset(20, 2, 3, 3);
  const std::string text = to_text(train_algorithm(data, quick(AlgorithmKind::kfhe_cc), 4));
  CHECK_THROWS_AS(from_text(""), SerializationError);
  CHECK_THROWS_AS(from_text("not-a-model 1\n"), SerializationError);
  std::string future = text;
  future.replace(future.find("mlkfhe-model 1"), 14, "mlkfhe-model 9");
  CHECK_THROWS_AS(from_text(future), SerializationError);
  CHECK_THROWS_AS(from_text(text.substr(0, text.size() / 2)), SerializationError);
  std::string no_end = text.substr(0, text.rfind("end"));
  CHECK_THROWS_AS(from_text(no_end), SerializationError);
}

TEST_CASE("token escaping") {
  for (const std::string s : {"", "plain", "two words", "tab\there", "100%", "new\nline", "%e"}) {
    const auto e = escape_token(s);
    CHECK(e.find_first_of(" \t\n") == std::string::npos);
    CHECK_FALSE(e.empty());
    CHECK(unescape_token(e) == s);
  }
  CHECK_THROWS_AS(unescape_token("bad%2"), SerializationError);
  CHECK_THROWS_AS(unescape_token("bad%zz"), SerializationError);
}

}
