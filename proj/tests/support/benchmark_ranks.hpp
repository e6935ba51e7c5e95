#pragma once

#include <array>
#include <string_view>

#include "mlkfhe/types.hpp"

namespace mlkfhe::testing {

// Reference per-dataset ranks of ten multi-label methods on thirteen
// benchmark datasets (macro-F, rank 1 = best), with their average ranks.
inline constexpr std::array<std::string_view, 10> kRankedMethods{
    "ML-KFHE-HOMER", "E-HOMER", "ML-KFHE-CC", "ECC", "HOMER-B",
    "CC", "RAkEL2", "HOMER-K", "RF-PCT", "AdaBoost.MH"};

inline constexpr double kReferenceRanks[13][10] = {
    {1, 2, 7, 6, 3, 8, 9, 4, 5, 10},          // flags
    {1, 5, 2, 4, 7, 3, 6, 9, 8, 10},          // yeast
    {1, 2, 3, 6, 7, 5, 4, 9, 8, 10},          // scene
    {1, 4, 6.5, 6.5, 2, 9, 3, 5, 8, 10},      // emotions
    {1, 3, 4, 2, 7, 6, 5, 9, 10, 8},          // medical
    {1, 2, 3, 4, 7, 6, 8, 5, 9, 10},          // enron
    {1, 2, 3, 4, 6, 5, 8, 7, 9, 10},          // birds
    {1, 6, 3, 2, 8, 4, 5, 7, 10, 9},          // genbase
    {1, 2, 3, 4, 10, 6, 8, 7, 5, 9},          // cal500
    {5, 6, 7, 9, 8, 2, 4, 10, 1, 3},          // llog
    {1, 4, 3, 7, 6, 8, 9, 2, 5, 10},          // foodtruck
    {2, 1, 6, 7, 3, 8, 9, 4, 5, 10},          // Water_quality
    {1, 2, 5, 4, 3, 8, 6, 7, 9, 10},          // PlantPseAAC
};

inline constexpr double kReferenceAverageRanks[10] = {1.38, 3.15, 4.27, 5.04, 5.92,
                                                      6.00, 6.46, 6.54, 7.08, 9.15};

inline Matrix reference_rank_matrix() {
  Matrix m(13, 10);
  for (Eigen::Index i = 0; i < 13; ++i) {
    for (Eigen::Index j = 0; j < 10; ++j) m(i, j) = kReferenceRanks[i][j];
  }
  return m;
}

}  // namespace mlkfhe::testing
