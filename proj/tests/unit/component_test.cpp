#include <doctest.h>

#include <algorithm>
#include <set>

#include "mlkfhe/component.hpp"
#include "test_support.hpp"

using namespace mlkfhe;

TEST_SUITE("component") {

TEST_CASE("max clusters is ceil sqrt q, at least two") {
  CHECK(max_homer_clusters(2) == 2);
  CHECK(max_homer_clusters(4) == 2);
  CHECK(max_homer_clusters(5) == 3);
  CHECK(max_homer_clusters(7) == 3);
  CHECK(max_homer_clusters(9) == 3);
  CHECK(max_homer_clusters(10) == 4);
  CHECK(max_homer_clusters(174) == 14);
}

TEST_CASE("homer draws cover the whole grid") {
  Rng rng(3);
  std::set<std::tuple<int, std::size_t, int>> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto draw = draw_component(Family::homer, 10, rng);
    CHECK(draw.family == Family::homer);
    CHECK(draw.k >= 2);
    CHECK(draw.k <= 4);
    CHECK(draw.order.empty());
    seen.insert({static_cast<int>(draw.clustering), draw.k, static_cast<int>(draw.kernel)});
  }
  CHECK(seen.size() == 3 * 3 * 2);
}

TEST_CASE("cc draws are permutations with both kernels") {
  Rng rng(4);
  std::set<std::vector<std::size_t>> orders;
  std::set<int> kernels;
  for (int i = 0; i < 200; ++i) {
    const auto draw = draw_component(Family::cc, 4, rng);
    auto sorted = draw.order;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<std::size_t>{0, 1, 2, 3});
    orders.insert(draw.order);
    kernels.insert(static_cast<int>(draw.kernel));
  }
  CHECK(orders.size() == 24);
  CHECK(kernels.size() == 2);
}

TEST_CASE("draws are reproducible from the generator state") {
  Rng a(99), b(99);
  for (int i = 0; i < 20; ++i) {
    CHECK(draw_component(Family::cc, 6, a) == draw_component(Family::cc, 6, b));
  }
}

TEST_CASE("trained components dispatch by family") {
  const auto data = mlkfhe::testing::random_dataset(40, 3, 5, 8);
  const auto w = uniform_weights(40);
  Rng rng(1);
  for (Family family : {Family::homer, Family::cc}) {
    const auto draw = draw_component(family, 5, rng);
    BinaryLearnerSpec base;
    base.max_epochs = 100;
    const Component c = train_component(data, w, draw, base);
    CHECK(std::holds_alternative<HomerTree>(c) == (family == Family::homer));
    CHECK(component_input_dim(c) == 3);
    CHECK(component_num_labels(c) == 5);
    const ScoreMatrix all = predict_component(c, data.features);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const Vector row = predict_component(c, data.row(i));
      CHECK(all.row(static_cast<Eigen::Index>(i)).transpose() == row);
      CHECK(row.minCoeff() >= 0.0);
      CHECK(row.maxCoeff() <= 1.0);
    }
  }
}

TEST_CASE("family names") {
  CHECK(parse_family("homer") == Family::homer);
  CHECK(parse_family("cc") == Family::cc);
  CHECK(to_string(Family::cc) == "cc");
  CHECK_THROWS_AS(parse_family("br"), std::invalid_argument);
}

}
