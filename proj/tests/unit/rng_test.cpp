#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "mlkfhe/rng.hpp"

using namespace mlkfhe;

TEST_SUITE("rng") {

TEST_CASE("seeded streams are reproducible") {
  Rng a(42), b(42);
  for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
  CHECK(Rng(42).next() != Rng(43).next());
}

TEST_CASE("derived seeds depend on every path element") {
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2}) != derive_seed(1, {2, 0}));
  CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
}

TEST_CASE("uniform samplers stay in range") {
  Rng rng(7);
  std::vector<int> hist(5, 0);
  for (int i = 0; i < 5000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const auto k = rng.uniform_index(5);
    REQUIRE(k < 5);
    ++hist[k];
  }
  for (int h : hist) CHECK(h > 850);
  CHECK_THROWS(rng.uniform_index(0));
}

TEST_CASE("normal samples have roughly unit moments") {
  Rng rng(3);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.05);
  CHECK(std::abs(sq / n - 1.0) < 0.05);
}

TEST_CASE("shuffle is a permutation") {
  Rng rng(9);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  auto w = v;
  rng.shuffle(w);
  CHECK(w != v);
  std::sort(w.begin(), w.end());
  CHECK(w == v);
}

TEST_CASE("weighted resample counts total the draw count and follow the weights") {
  Rng rng(1);
  const std::vector<double> weights{0.0, 1.0, 3.0};
  const auto counts = weighted_resample_counts(weights, 8000, rng);
  CHECK(std::accumulate(counts.begin(), counts.end(), 0.0) == 8000.0);
  CHECK(counts[0] == 0.0);
  CHECK(counts[2] / counts[1] == doctest::Approx(3.0).epsilon(0.1));
}

TEST_CASE("bootstrap sample has the requested size with replacement") {
  Rng rng(2);
  const auto sample = bootstrap_sample(10, 20, rng);
  CHECK(sample.size() == 20);
  CHECK(std::all_of(sample.begin(), sample.end(), [](std::size_t i) { return i < 10; }));
  auto sorted = sample;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end());
  const auto counts = sample_counts(sample, 10);
  CHECK(std::accumulate(counts.begin(), counts.end(), 0.0) == 20.0);
}

}
