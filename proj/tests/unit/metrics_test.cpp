#include <doctest.h>

#include <numeric>
#include <random>

#include "mlkfhe/metrics.hpp"
#include "test_support.hpp"

using namespace mlkfhe;
using mlkfhe::testing::labels_from;

TEST_SUITE("metrics") {

TEST_CASE("hamming loss examples") {
  const auto y = labels_from({{1, 0}, {0, 1}, {1, 1}});
  const auto p = labels_from({{1, 0}, {1, 1}, {1, 0}});
  CHECK(hamming_loss(y, y) == 0.0);
  CHECK(hamming_loss(y, p) == 2.0 / 6.0);
  const LabelMatrix complement = (y.array() == 0).cast<std::uint8_t>();
  CHECK(hamming_loss(y, complement) == 1.0);
  CHECK_THROWS_AS(hamming_loss(y, labels_from({{1, 0}})), std::invalid_argument);
}

TEST_CASE("per-instance hamming examples") {
  const std::vector<std::uint8_t> a{1, 0, 1}, b{0, 0, 1}, c{0, 1, 0};
  CHECK(per_instance_hamming(a, a) == 0.0);
  CHECK(per_instance_hamming(a, b) == 1.0 / 3.0);
  CHECK(per_instance_hamming(a, c) == 1.0);
  CHECK_THROWS_AS(per_instance_hamming(a, std::vector<std::uint8_t>{1, 0}), std::invalid_argument);
}

TEST_CASE("macro F examples") {
  const auto y = labels_from({{1, 0}, {0, 1}, {1, 1}});
  const auto p = labels_from({{1, 0}, {1, 1}, {1, 0}});
  // Label 0: tp 2, fp 1, fn 0 -> 4/5. Label 1: tp 1, fp 0, fn 1 -> 2/3.
  const auto f = macro_f(y, p);
  CHECK(f.per_label[0] == 0.8);
  CHECK(f.per_label[1] == 2.0 / 3.0);
  CHECK(f.macro == (0.8 + 2.0 / 3.0) / 2.0);
  CHECK(f.macro == doctest::Approx(0.7333).epsilon(1e-4));
  CHECK(macro_f(y, y).macro == 1.0);

  const auto zeros = labels_from({{0, 0}, {0, 0}});
  CHECK(macro_f(zeros, zeros).macro == 1.0);
  CHECK(macro_f(labels_from({{1, 0}, {0, 0}}), labels_from({{0, 0}, {1, 0}})).per_label[0] == 0.0);
  CHECK_THROWS_AS(macro_f(y, labels_from({{1}, {0}, {1}})), std::invalid_argument);
}

TEST_CASE("report fields agree with their definitions") {
  std::mt19937 gen(5);
  for (std::uint32_t trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + gen() % 30, q = 1 + gen() % 8;
    const auto y = mlkfhe::testing::random_labels(n, q, 0.4, trial);
    const auto p = mlkfhe::testing::random_labels(n, q, 0.4, trial + 1000);
    const auto report = evaluate(y, p);
    std::size_t errors = 0;
    for (const auto& c : report.confusion) {
      errors += c.fp + c.fn;
      CHECK(c.tp + c.fp + c.fn + c.tn == n);
    }
    CHECK(report.hamming_loss == doctest::Approx(static_cast<double>(errors) / static_cast<double>(n * q)).epsilon(1e-15));
    CHECK(report.hamming_loss == hamming_loss(y, p));
    CHECK(report.macro_f == doctest::Approx(macro_f(y, p).macro).epsilon(1e-15));
    CHECK(report.macro_f >= 0.0);
    CHECK(report.macro_f <= 1.0);

    // Identical column permutation of both matrices leaves macro-F unchanged.
    std::vector<Eigen::Index> perm(q);
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    std::shuffle(perm.begin(), perm.end(), gen);
    LabelMatrix yp(y.rows(), y.cols()), pp(p.rows(), p.cols());
    for (std::size_t j = 0; j < q; ++j) {
      yp.col(static_cast<Eigen::Index>(j)) = y.col(perm[j]);
      pp.col(static_cast<Eigen::Index>(j)) = p.col(perm[j]);
    }
    CHECK(macro_f(yp, pp).macro == doctest::Approx(report.macro_f).epsilon(1e-12));
  }
}

TEST_CASE("hamming loss is the mean per-instance loss") {
  for (std::uint32_t trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 23, q = 1 + trial % 7;
    const auto y = mlkfhe::testing::random_labels(n, q, 0.5, trial);
    const auto p = mlkfhe::testing::random_labels(n, q, 0.5, trial + 7);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < y.rows(); ++i) sum += per_instance_hamming(row_span(y, i), row_span(p, i));
    CHECK(std::abs(sum / static_cast<double>(n) - hamming_loss(y, p)) <= 1e-12);
  }
}

TEST_CASE("dataset statistics on a hand fixture") {
  Matrix x = Matrix::Zero(4, 3);
  const auto y = labels_from({{1, 1, 0}, {1, 0, 0}, {1, 0, 1}, {1, 1, 0}});
  const auto stats = dataset_stats(make_dataset(x, y));
  CHECK(stats.instances == 4);
  CHECK(stats.inputs == 3);
  CHECK(stats.labels == 3);
  CHECK(stats.cardinality == 7.0 / 4.0);
  // Counts 4, 2, 1: IR 1, 2, 4.
  CHECK(stats.mean_ir == 7.0 / 3.0);
  CHECK(stats.label_counts == std::vector<std::size_t>{4, 2, 1});
}

TEST_CASE("dataset statistics conventions") {
  Matrix x = Matrix::Zero(3, 1);
  const auto single = labels_from({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  const auto s = dataset_stats(make_dataset(x, single));
  CHECK(s.cardinality == 1.0);
  CHECK(s.mean_ir == 1.0);

  mlkfhe::testing::WarningCapture capture;
  const auto empty_label = labels_from({{1, 0, 0}, {1, 1, 0}, {0, 1, 0}});
  const auto e = dataset_stats(make_dataset(x, empty_label));
  CHECK(e.mean_ir == 1.0);
  CHECK(capture.messages.size() == 1);
}

}
