#pragma once

// Significance tests for comparing classifiers over datasets and folds.

#include <cstddef>
#include <span>
#include <vector>

#include "mlkfhe/types.hpp"

namespace mlkfhe {

/// Sample sizes up to this use the exact null distribution.
inline constexpr std::size_t kWilcoxonExactLimit = 12;

struct WilcoxonResult {
  double statistic = 0.0;  // W+ - W-; negates when a and b are swapped
  double p_value = 1.0;    // two-tailed
  std::size_t effective_size = 0;  // pairs left after discarding zero differences
  bool exact = true;
};

/// Two-tailed paired signed-rank test of a against b. Zero differences are
/// discarded and tied magnitudes get midranks. If every difference is zero
/// the p-value is 1.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

/// Midranks of `values` (1-based); ascending ranks the smallest value 1.
std::vector<double> midranks(std::span<const double> values, bool ascending = true);

enum class ScoreOrder {
  higher_is_better,  // e.g. macro-F
  lower_is_better,   // e.g. Hamming loss, or ranks fed in directly
};

struct FriedmanResult {
  std::vector<double> average_ranks;  // rank 1 = best
  double chi_square = 0.0;
  double p_value = 1.0;
  std::size_t control = 0;
  // Versus-control comparisons, indexed by algorithm; the control's own
  // entries are z = 0, p = 1.
  std::vector<double> z;
  std::vector<double> raw_p;
  std::vector<double> adjusted_p;
};

/// Friedman test over a datasets x algorithms score table, followed by
/// z-tests of every algorithm against `control` with Finner's step-down
/// adjustment. Throws std::invalid_argument for fewer than 2 datasets or
/// algorithms, or an out-of-range control.
FriedmanResult friedman_finner(const Matrix& scores, std::size_t control,
                               ScoreOrder order = ScoreOrder::higher_is_better);

/// Per-dataset midranks, rank 1 = best.
Matrix rank_rows(const Matrix& scores, ScoreOrder order = ScoreOrder::higher_is_better);

/// Finner step-down adjustment. The result is in input order; over the
/// sorted p-values it is nondecreasing and within [0, 1].
std::vector<double> finner_adjust(std::span<const double> p_values);

struct PairwiseComparison {
  std::size_t a = 0;
  std::size_t b = 0;
  double z = 0.0;
  double p_value = 1.0;
  double adjusted_p = 1.0;
};

/// All k(k-1)/2 pairwise rank-difference z-tests, Finner-adjusted jointly.
std::vector<PairwiseComparison> friedman_pairwise(const Matrix& scores,
                                                  ScoreOrder order = ScoreOrder::higher_is_better);

/// Two-tailed standard normal p-value for |z|.
double normal_two_tailed_p(double z);

}  // namespace mlkfhe
