#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "benchmark_ranks.hpp"
#include "mlkfhe/stats.hpp"
#include "oracles.hpp"

using namespace mlkfhe;

TEST_SUITE("stats") {

TEST_CASE("wilcoxon examples") {
  const std::vector<double> a{0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  CHECK(wilcoxon_signed_rank(a, a).p_value == 1.0);

  const std::vector<double> b{0.4, 0.45, 0.5, 0.55, 0.6, 0.65};
  const auto r = wilcoxon_signed_rank(a, b);
  CHECK(r.exact);
  CHECK(r.effective_size == 6);
  CHECK(r.p_value == 2.0 / 64.0);
  CHECK(r.statistic == 21.0);

  const auto swapped = wilcoxon_signed_rank(b, a);
  CHECK(swapped.p_value == r.p_value);
  CHECK(swapped.statistic == -r.statistic);

  CHECK_THROWS_AS(wilcoxon_signed_rank(a, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("wilcoxon exact mode matches enumeration") {
  std::mt19937 gen(17);
  std::uniform_int_distribution<int> small(-4, 4);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t m = 1 + trial % 10;
    std::vector<double> a(m), b(m);
    for (std::size_t i = 0; i < m; ++i) {
      a[i] = small(gen);
      b[i] = small(gen);
    }
    const auto oracle = mlkfhe::testing::brute_force_wilcoxon(a, b);
    const auto got = wilcoxon_signed_rank(a, b);
    CHECK(got.p_value == doctest::Approx(oracle.p_value).epsilon(1e-12));
    CHECK(got.statistic == doctest::Approx(oracle.w_plus - oracle.w_minus).epsilon(1e-12));
  }
}

TEST_CASE("wilcoxon normal approximation for larger samples") {
  std::vector<double> a(30), b(30);
  for (std::size_t i = 0; i < 30; ++i) {
    a[i] = static_cast<double>(i) + 1.0;
    b[i] = 0.0;
  }
  const auto r = wilcoxon_signed_rank(a, b);
  CHECK_FALSE(r.exact);
  // W+ = 465, mean 232.5, sd sqrt(30*31*61/24); continuity-corrected z.
  const double sd = std::sqrt(30.0 * 31.0 * 61.0 / 24.0);
  const double z = (465.0 - 232.5 - 0.5) / sd;
  CHECK(r.p_value == doctest::Approx(std::erfc(z / std::sqrt(2.0))).epsilon(1e-12));

  std::mt19937 gen(2);
  std::normal_distribution<double> noise;
  for (std::size_t i = 0; i < 30; ++i) {
    a[i] = noise(gen);
    b[i] = noise(gen);
  }
  const auto mixed = wilcoxon_signed_rank(a, b);
  CHECK(mixed.p_value > 0.0);
  CHECK(mixed.p_value <= 1.0);
}

TEST_CASE("midranks") {
  const std::vector<double> v{3.0, 1.0, 3.0, 2.0};
  CHECK(midranks(v) == std::vector<double>{3.5, 1.0, 3.5, 2.0});
  CHECK(midranks(v, false) == std::vector<double>{1.5, 4.0, 1.5, 3.0});
}

TEST_CASE("identical algorithms share midrank 1.5") {
  Matrix scores(4, 2);
  scores << 0.5, 0.5, 0.7, 0.7, 0.1, 0.1, 0.9, 0.9;
  const auto r = friedman_finner(scores, 0);
  CHECK(r.average_ranks == std::vector<double>{1.5, 1.5});
  CHECK(r.chi_square == 0.0);
  CHECK(r.p_value == 1.0);
}

TEST_CASE("friedman with three algorithms against a closed form") {
  Matrix scores(5, 3);
  scores << 0.9, 0.8, 0.7,
            0.8, 0.9, 0.1,
            0.7, 0.6, 0.5,
            0.6, 0.5, 0.55,
            0.9, 0.7, 0.8;
  // Ranks: (1,2,3), (2,1,3), (1,2,3), (1,3,2), (1,3,2).
  const auto r = friedman_finner(scores, 0);
  const std::vector<double> avg{6.0 / 5.0, 11.0 / 5.0, 13.0 / 5.0};
  for (std::size_t j = 0; j < 3; ++j) CHECK(r.average_ranks[j] == doctest::Approx(avg[j]).epsilon(1e-15));
  double sum_sq = 0.0;
  for (double a : avg) sum_sq += a * a;
  const double chi = 12.0 * 5.0 / 12.0 * (sum_sq - 3.0 * 16.0 / 4.0);
  CHECK(r.chi_square == doctest::Approx(chi).epsilon(1e-12));
  // Two degrees of freedom: the chi-square tail is exp(-x/2).
  CHECK(r.p_value == doctest::Approx(std::exp(-chi / 2.0)).epsilon(1e-12));

  const double se = std::sqrt(3.0 * 4.0 / (6.0 * 5.0));
  CHECK(r.z[0] == 0.0);
  CHECK(r.raw_p[0] == 1.0);
  for (std::size_t j = 1; j < 3; ++j) {
    const double z = (avg[j] - avg[0]) / se;
    CHECK(std::abs(r.z[j]) == doctest::Approx(std::abs(z)).epsilon(1e-12));
    CHECK(r.raw_p[j] == doctest::Approx(std::erfc(std::abs(z) / std::sqrt(2.0))).epsilon(1e-12));
  }
  // Two comparisons: smaller p gets 1-(1-p)^2, the larger 1-(1-p)^1, then a running max.
  const double p_lo = std::min(r.raw_p[1], r.raw_p[2]), p_hi = std::max(r.raw_p[1], r.raw_p[2]);
  const double adj_lo = 1.0 - std::pow(1.0 - p_lo, 2.0);
  const double adj_hi = std::max(adj_lo, p_hi);
  const std::size_t lo_index = r.raw_p[1] <= r.raw_p[2] ? 1 : 2;
  CHECK(r.adjusted_p[lo_index] == doctest::Approx(adj_lo).epsilon(1e-12));
  CHECK(r.adjusted_p[3 - lo_index] == doctest::Approx(adj_hi).epsilon(1e-12));

  CHECK_THROWS_AS(friedman_finner(scores.topRows(1), 0), std::invalid_argument);
  CHECK_THROWS_AS(friedman_finner(scores.leftCols(1), 0), std::invalid_argument);
  CHECK_THROWS_AS(friedman_finner(scores, 3), std::invalid_argument);
}

TEST_CASE("finner adjustment examples and properties") {
  const std::vector<double> p{0.01, 0.04, 0.03};
  const auto adj = finner_adjust(p);
  CHECK(adj[0] == doctest::Approx(1.0 - std::pow(0.99, 3.0)).epsilon(1e-12));
  CHECK(adj[2] == doctest::Approx(1.0 - std::pow(0.97, 1.5)).epsilon(1e-12));
  CHECK(adj[1] == adj[2]);

  std::mt19937 gen(8);
  std::uniform_real_distribution<double> u;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> raw(1 + trial % 12);
    for (double& v : raw) v = u(gen) * u(gen);
    const auto a = finner_adjust(raw);
    std::vector<std::size_t> order(raw.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return raw[x] < raw[y]; });
    for (std::size_t i = 0; i < order.size(); ++i) {
      CHECK(a[order[i]] >= raw[order[i]] - 1e-15);
      CHECK(a[order[i]] <= 1.0);
      if (i > 0) CHECK(a[order[i]] >= a[order[i - 1]]);
    }
  }
}

TEST_CASE("rank sums are conserved") {
  std::mt19937 gen(4);
  std::uniform_real_distribution<double> u;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 2 + trial % 9, k = 2 + trial % 7;
    Matrix scores(n, k);
    for (Eigen::Index i = 0; i < scores.size(); ++i) scores.data()[i] = std::round(u(gen) * 4.0) / 4.0;
    const Matrix ranks = rank_rows(scores);
    for (Eigen::Index i = 0; i < n; ++i) {
      CHECK(ranks.row(i).sum() == doctest::Approx(static_cast<double>(k * (k + 1)) / 2.0));
    }
    const auto r = friedman_finner(scores, 0);
    double total = 0.0;
    for (double a : r.average_ranks) total += a;
    CHECK(total == doctest::Approx(static_cast<double>(k * (k + 1)) / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("reference rank table reproduces its average ranks") {
  const Matrix ranks = mlkfhe::testing::reference_rank_matrix();
  const auto r = friedman_finner(ranks, 0, ScoreOrder::lower_is_better);
  for (std::size_t j = 0; j < 10; ++j) {
    CHECK(std::abs(r.average_ranks[j] - mlkfhe::testing::kReferenceAverageRanks[j]) <= 0.005 + 1e-12);
  }
  // Feeding ranks in directly leaves them unchanged.
  CHECK(rank_rows(ranks, ScoreOrder::lower_is_better) == ranks);
}

TEST_CASE("pairwise comparisons on the reference rank table") {
  const Matrix ranks = mlkfhe::testing::reference_rank_matrix();
  const auto pairs = friedman_pairwise(ranks, ScoreOrder::lower_is_better);
  REQUIRE(pairs.size() == 45);
  auto find = [&](std::size_t a, std::size_t b) {
    for (const auto& p : pairs) {
      if ((p.a == a && p.b == b) || (p.a == b && p.b == a)) return p;
    }
    FAIL("missing pair");
    return PairwiseComparison{};
  };
  // Cells of the reference pairwise table that the standard z-test with
  // Finner adjustment over all 45 pairs reproduces to four decimals.
  CHECK(std::abs(find(0, 1).adjusted_p - 0.2166) <= 5e-5 + 1e-12);
  CHECK(std::abs(find(0, 4).adjusted_p - 0.0007) <= 5e-5 + 1e-12);
  CHECK(std::abs(find(0, 6).adjusted_p - 0.0002) <= 5e-5 + 1e-12);
  CHECK(std::abs(find(6, 9).adjusted_p - 0.0518) <= 5e-5 + 1e-12);
  CHECK(std::abs(find(7, 9).adjusted_p - 0.0583) <= 5e-5 + 1e-12);
  CHECK(std::abs(find(8, 9).adjusted_p - 0.1453) <= 5e-5 + 1e-12);
  for (const auto& p : pairs) {
    CHECK(p.adjusted_p >= p.p_value - 1e-15);
    CHECK(p.p_value == doctest::Approx(normal_two_tailed_p(p.z)).epsilon(1e-15));
  }
}

}
