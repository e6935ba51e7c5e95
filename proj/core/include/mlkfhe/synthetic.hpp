#pragma once

#include <cstdint>

#include "mlkfhe/dataset.hpp"

namespace mlkfhe {

/// Gaussian features with labels planted in groups of three: the first two
/// labels of a group threshold nearby linear directions, the third is the
/// conjunction of its predecessor with a further linear condition, so label
/// correlations and chain dependencies are both present.
struct SyntheticSpec {
  std::size_t instances = 300;
  std::size_t features = 10;
  std::size_t labels = 6;
  double label_noise = 0.05;  // probability of flipping each label cell
  double min_positive_rate = 0.15;
  double max_positive_rate = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Every label ends up with at least one positive and one negative instance.
Dataset make_synthetic(const SyntheticSpec& spec);

}  // namespace mlkfhe
