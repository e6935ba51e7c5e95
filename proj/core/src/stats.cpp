#include "mlkfhe/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace mlkfhe {

namespace {

struct RankedDifferences {
  std::vector<double> magnitude_ranks;
  std::vector<bool> positive;
};

RankedDifferences rank_differences(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired samples differ in length");
  std::vector<double> magnitudes;
  RankedDifferences out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (std::isnan(d)) throw std::invalid_argument("paired samples contain NaN");
    if (d == 0.0) continue;
    magnitudes.push_back(std::abs(d));
    out.positive.push_back(d > 0.0);
  }
  out.magnitude_ranks = midranks(magnitudes);
  return out;
}

void require_table(const Matrix& scores) {
  if (scores.rows() < 2) throw std::invalid_argument("at least 2 datasets are required");
  if (scores.cols() < 2) throw std::invalid_argument("at least 2 algorithms are required");
  if (!scores.allFinite()) throw std::invalid_argument("score table contains non-finite values");
}

}  // namespace

std::vector<double> midranks(std::span<const double> values, bool ascending) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return ascending ? values[x] < values[y] : values[x] > values[y];
  });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double normal_two_tailed_p(double z) {
  return std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  const RankedDifferences diffs = rank_differences(a, b);
  const std::size_t m = diffs.magnitude_ranks.size();
  WilcoxonResult result;
  result.effective_size = m;
  if (m == 0) return result;

  // Midranks are multiples of 1/2, so doubled ranks are exact integers.
  std::vector<std::int64_t> doubled(m);
  std::int64_t total = 0;
  std::int64_t positive = 0;
  for (std::size_t i = 0; i < m; ++i) {
    doubled[i] = std::llround(2.0 * diffs.magnitude_ranks[i]);
    total += doubled[i];
    if (diffs.positive[i]) positive += doubled[i];
  }
  // total = m(m+1) is even, so the null mean of doubled W+ is an integer.
  const std::int64_t mean = total / 2;
  result.statistic = static_cast<double>(positive - mean);

  if (m <= kWilcoxonExactLimit) {
    const std::int64_t observed = std::abs(positive - mean);
    const std::uint64_t patterns = std::uint64_t{1} << m;
    std::uint64_t extreme = 0;
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
      std::int64_t sum = 0;
      for (std::size_t i = 0; i < m; ++i) {
        if (mask >> i & 1U) sum += doubled[i];
      }
      if (std::abs(sum - mean) >= observed) ++extreme;
    }
    result.p_value = static_cast<double>(extreme) / static_cast<double>(patterns);
    result.exact = true;
    return result;
  }

  const double md = static_cast<double>(m);
  double tie_term = 0.0;
  std::vector<double> sorted = diffs.magnitude_ranks;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double variance = md * (md + 1.0) * (2.0 * md + 1.0) / 24.0 - tie_term / 48.0;
  const double deviation = std::abs(static_cast<double>(positive - mean)) / 2.0;
  const double corrected = std::max(0.0, deviation - 0.5);
  result.exact = false;
  result.p_value = variance > 0.0 ? normal_two_tailed_p(corrected / std::sqrt(variance)) : 1.0;
  return result;
}

Matrix rank_rows(const Matrix& scores, ScoreOrder order) {
  Matrix ranks(scores.rows(), scores.cols());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const auto r = midranks(row_span(scores, i), order == ScoreOrder::lower_is_better);
    for (Eigen::Index j = 0; j < scores.cols(); ++j) ranks(i, j) = r[static_cast<std::size_t>(j)];
  }
  return ranks;
}

std::vector<double> finner_adjust(std::span<const double> p_values) {
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return p_values[x] < p_values[y]; });
  std::vector<double> adjusted(m);
  double running = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double p = std::clamp(p_values[order[j]], 0.0, 1.0);
    const double exponent = static_cast<double>(m) / static_cast<double>(j + 1);
    running = std::max(running, 1.0 - std::pow(1.0 - p, exponent));
    adjusted[order[j]] = std::clamp(running, 0.0, 1.0);
  }
  return adjusted;
}

FriedmanResult friedman_finner(const Matrix& scores, std::size_t control, ScoreOrder order) {
  require_table(scores);
  const auto k = static_cast<std::size_t>(scores.cols());
  if (control >= k) throw std::invalid_argument("control algorithm index out of range");
  const double n = static_cast<double>(scores.rows());
  const double kd = static_cast<double>(k);

  const Matrix ranks = rank_rows(scores, order);
  FriedmanResult result;
  result.control = control;
  result.average_ranks.resize(k);
  double sum_sq = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    result.average_ranks[j] = ranks.col(static_cast<Eigen::Index>(j)).mean();
    sum_sq += result.average_ranks[j] * result.average_ranks[j];
  }
  result.chi_square =
      12.0 * n / (kd * (kd + 1.0)) * (sum_sq - kd * (kd + 1.0) * (kd + 1.0) / 4.0);
  result.chi_square = std::max(0.0, result.chi_square);
  result.p_value = boost::math::gamma_q((kd - 1.0) / 2.0, result.chi_square / 2.0);

  const double se = std::sqrt(kd * (kd + 1.0) / (6.0 * n));
  result.z.assign(k, 0.0);
  result.raw_p.assign(k, 1.0);
  result.adjusted_p.assign(k, 1.0);
  std::vector<double> others;
  std::vector<std::size_t> index;
  for (std::size_t j = 0; j < k; ++j) {
    if (j == control) continue;
    result.z[j] = (result.average_ranks[j] - result.average_ranks[control]) / se;
    result.raw_p[j] = normal_two_tailed_p(result.z[j]);
    others.push_back(result.raw_p[j]);
    index.push_back(j);
  }
  const auto adjusted = finner_adjust(others);
  for (std::size_t i = 0; i < index.size(); ++i) result.adjusted_p[index[i]] = adjusted[i];
  return result;
}

std::vector<PairwiseComparison> friedman_pairwise(const Matrix& scores, ScoreOrder order) {
  require_table(scores);
  const auto k = static_cast<std::size_t>(scores.cols());
  const double kd = static_cast<double>(k);
  const Matrix ranks = rank_rows(scores, order);
  const double se = std::sqrt(kd * (kd + 1.0) / (6.0 * static_cast<double>(scores.rows())));
  std::vector<PairwiseComparison> out;
  std::vector<double> p;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      PairwiseComparison c;
      c.a = a;
      c.b = b;
      c.z = (ranks.col(static_cast<Eigen::Index>(a)).mean() -
             ranks.col(static_cast<Eigen::Index>(b)).mean()) / se;
      c.p_value = normal_two_tailed_p(c.z);
      p.push_back(c.p_value);
      out.push_back(c);
    }
  }
  const auto adjusted = finner_adjust(p);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].adjusted_p = adjusted[i];
  return out;
}

}  // namespace mlkfhe
