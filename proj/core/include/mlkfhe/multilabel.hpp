#pragma once

// Flat multi-label learners built from binary models: binary relevance,
// classifier chains and a constant prior model.

#include <span>
#include <vector>

#include "mlkfhe/binary_learner.hpp"
#include "mlkfhe/dataset.hpp"
#include "mlkfhe/rng.hpp"

namespace mlkfhe {

/// One independent binary model per label.
struct BinaryRelevanceModel {
  std::vector<BinaryModel> models;
  std::size_t input_dim = 0;

  std::size_t num_labels() const { return models.size(); }
  Vector predict(std::span<const double> x) const;
};

BinaryRelevanceModel train_br(const Dataset& data, std::span<const double> instance_weights,
                              const BinaryLearnerSpec& spec);

/// Classifier chain. Position l predicts label order[l] from the input
/// concatenated with the labels at positions 0..l-1.
struct ChainModel {
  std::vector<std::size_t> order;
  std::vector<BinaryModel> models;
  std::size_t input_dim = 0;

  std::size_t num_labels() const { return order.size(); }
  std::size_t position_input_dim(std::size_t position) const { return input_dim + position; }

  /// Predicts in chain order, feeding thresholded decisions forward. Scores
  /// are returned in the original label order.
  Vector predict(std::span<const double> x) const;
};

/// Training uses the ground-truth labels of earlier positions as the extra
/// inputs. Throws std::invalid_argument when `order` is not a permutation of
/// 0..q-1.
ChainModel train_cc(const Dataset& data, std::span<const double> instance_weights,
                    std::span<const std::size_t> order, const BinaryLearnerSpec& spec);

inline Vector predict_cc(const ChainModel& model, std::span<const double> x) {
  return model.predict(x);
}

/// Ignores its input and returns fixed per-label scores.
struct ConstantModel {
  Vector scores;
  std::size_t input_dim = 0;

  std::size_t num_labels() const { return static_cast<std::size_t>(scores.size()); }
  Vector predict(std::span<const double> x) const;
};

/// Weighted per-label prior.
ConstantModel train_constant(const Dataset& data, std::span<const double> instance_weights);

void validate_permutation(std::span<const std::size_t> order, std::size_t q);
std::vector<std::size_t> random_permutation(std::size_t q, Rng& rng);

/// Label column j as a contiguous vector.
std::vector<std::uint8_t> label_column(const LabelMatrix& labels, std::size_t j);

}  // namespace mlkfhe
