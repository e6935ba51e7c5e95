#include "mlkfhe/synthetic.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "mlkfhe/rng.hpp"

namespace mlkfhe {

void SyntheticSpec::validate() const {
  if (instances < 2) throw std::invalid_argument("synthetic data needs at least 2 instances");
  if (features < 1) throw std::invalid_argument("synthetic data needs at least 1 feature");
  if (labels < 2) throw std::invalid_argument("synthetic data needs at least 2 labels");
  if (!(label_noise >= 0.0 && label_noise < 0.5)) {
    throw std::invalid_argument("label noise must be in [0, 0.5)");
  }
  if (!(min_positive_rate > 0.0 && min_positive_rate <= max_positive_rate &&
        max_positive_rate < 1.0)) {
    throw std::invalid_argument("positive rates must satisfy 0 < min <= max < 1");
  }
}

Dataset make_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const auto n = static_cast<Eigen::Index>(spec.instances);
  const auto d = static_cast<Eigen::Index>(spec.features);
  const auto q = static_cast<Eigen::Index>(spec.labels);

  Matrix x(n, d);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();

  Vector group_direction(d);
  LabelMatrix y = LabelMatrix::Zero(n, q);
  std::vector<double> scores(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < q; ++j) {
    if (j % 3 == 0) {
      for (Eigen::Index c = 0; c < d; ++c) group_direction(c) = rng.normal();
    }
    Vector w(d);
    for (Eigen::Index c = 0; c < d; ++c) w(c) = group_direction(c) + 0.5 * rng.normal();
    for (Eigen::Index i = 0; i < n; ++i) {
      scores[static_cast<std::size_t>(i)] = x.row(i).dot(w);
    }
    const double rate =
        spec.min_positive_rate + (spec.max_positive_rate - spec.min_positive_rate) * rng.uniform();

    if (j % 3 == 2) {
      // Conjunction with the previous label keeps this one a subset of it.
      std::vector<double> sorted = scores;
      std::sort(sorted.begin(), sorted.end());
      const double median = sorted[sorted.size() / 2];
      for (Eigen::Index i = 0; i < n; ++i) {
        y(i, j) = y(i, j - 1) && scores[static_cast<std::size_t>(i)] >= median;
      }
    } else {
      std::vector<double> sorted = scores;
      std::sort(sorted.begin(), sorted.end());
      const auto cut = std::min(sorted.size() - 1,
                                static_cast<std::size_t>((1.0 - rate) * static_cast<double>(n)));
      const double threshold = sorted[cut];
      for (Eigen::Index i = 0; i < n; ++i) {
        y(i, j) = scores[static_cast<std::size_t>(i)] >= threshold;
      }
    }
  }

  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (rng.uniform() < spec.label_noise) y.data()[i] ^= 1;
  }
  for (Eigen::Index j = 0; j < q; ++j) {
    const auto positives = y.col(j).cast<int>().sum();
    if (positives == 0) y(0, j) = 1;
    if (positives == n) y(0, j) = 0;
  }
  return make_dataset(std::move(x), std::move(y));
}

}  // namespace mlkfhe
