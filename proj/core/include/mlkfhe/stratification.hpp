#pragma once

#include <cstdint>
#include <vector>

#include "mlkfhe/dataset.hpp"

namespace mlkfhe {

/// Fold index in [0, folds) for every instance.
struct FoldAssignment {
  std::vector<std::size_t> fold;
  std::size_t folds = 0;
  std::size_t repetition = 0;
  std::uint64_t seed = 0;

  std::vector<std::size_t> test_indices(std::size_t f) const;
  std::vector<std::size_t> train_indices(std::size_t f) const;
  std::vector<std::size_t> fold_sizes() const;

  /// Throws std::logic_error if an index is out of range or a fold is empty.
  void validate() const;
};

/// Iterative stratification: the scarcest remaining label is distributed
/// first, each of its instances (in index order) going to the fold with the
/// greatest remaining demand for that label, ties broken by remaining
/// capacity and then at random. Instances without labels are placed by
/// remaining capacity. Throws std::invalid_argument unless 2 <= folds <= n.
FoldAssignment iterative_stratification(const LabelMatrix& labels, std::size_t folds,
                                        std::uint64_t seed);
FoldAssignment iterative_stratification(const Dataset& data, std::size_t folds,
                                        std::uint64_t seed);

/// Shuffled round-robin split; fold sizes differ by at most one.
FoldAssignment random_folds(std::size_t n, std::size_t folds, std::uint64_t seed);

/// Mean over folds and labels of |fold proportion - overall proportion|.
double label_proportion_deviation(const LabelMatrix& labels, const FoldAssignment& folds);

}  // namespace mlkfhe
