#include "mlkfhe/stratification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mlkfhe/rng.hpp"

namespace mlkfhe {

namespace {

constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);

void check_fold_count(std::size_t n, std::size_t folds) {
  if (folds < 2) throw std::invalid_argument("at least 2 folds are required");
  if (folds > n) {
    throw std::invalid_argument("cannot split " + std::to_string(n) + " instances into " +
                                std::to_string(folds) + " folds");
  }
}

// Indices of the maximal entries of `values` restricted to `candidates`.
std::vector<std::size_t> argmax(const std::vector<double>& values,
                                const std::vector<std::size_t>& candidates) {
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> out;
  for (std::size_t f : candidates) {
    if (values[f] > best) {
      best = values[f];
      out.assign(1, f);
    } else if (values[f] == best) {
      out.push_back(f);
    }
  }
  return out;
}

}  // namespace

std::vector<std::size_t> FoldAssignment::test_indices(std::size_t f) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold.size(); ++i) {
    if (fold[i] == f) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::train_indices(std::size_t f) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold.size(); ++i) {
    if (fold[i] != f) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::fold_sizes() const {
  std::vector<std::size_t> sizes(folds, 0);
  for (std::size_t f : fold) {
    if (f >= folds) throw std::logic_error("fold index out of range");
    ++sizes[f];
  }
  return sizes;
}

void FoldAssignment::validate() const {
  for (std::size_t size : fold_sizes()) {
    if (size == 0) throw std::logic_error("fold assignment has an empty fold");
  }
}

FoldAssignment iterative_stratification(const LabelMatrix& labels, std::size_t folds,
                                        std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(labels.rows());
  const auto q = static_cast<std::size_t>(labels.cols());
  check_fold_count(n, folds);
  Rng rng(seed);

  const double share = 1.0 / static_cast<double>(folds);
  std::vector<double> capacity(folds, static_cast<double>(n) * share);
  std::vector<std::vector<double>> demand(q, std::vector<double>(folds));
  std::vector<std::size_t> remaining(q, 0);
  for (std::size_t j = 0; j < q; ++j) {
    for (std::size_t i = 0; i < n; ++i) remaining[j] += labels(i, j) != 0;
    std::fill(demand[j].begin(), demand[j].end(), static_cast<double>(remaining[j]) * share);
  }

  std::vector<std::size_t> all_folds(folds);
  std::iota(all_folds.begin(), all_folds.end(), std::size_t{0});

  FoldAssignment out;
  out.fold.assign(n, kUnassigned);
  out.folds = folds;
  out.seed = seed;

  const auto assign = [&](std::size_t i, std::size_t f) {
    out.fold[i] = f;
    capacity[f] -= 1.0;
    for (std::size_t j = 0; j < q; ++j) {
      if (labels(i, j) != 0) {
        demand[j][f] -= 1.0;
        --remaining[j];
      }
    }
  };

  for (;;) {
    std::size_t label = q;
    for (std::size_t j = 0; j < q; ++j) {
      if (remaining[j] > 0 && (label == q || remaining[j] < remaining[label])) label = j;
    }
    if (label == q) break;
    for (std::size_t i = 0; i < n; ++i) {
      if (out.fold[i] != kUnassigned || labels(i, label) == 0) continue;
      auto candidates = argmax(demand[label], all_folds);
      if (candidates.size() > 1) candidates = argmax(capacity, candidates);
      const std::size_t f =
          candidates.size() > 1 ? candidates[rng.uniform_index(candidates.size())] : candidates[0];
      assign(i, f);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (out.fold[i] != kUnassigned) continue;
    const auto candidates = argmax(capacity, all_folds);
    assign(i, candidates.size() > 1 ? candidates[rng.uniform_index(candidates.size())]
                                    : candidates[0]);
  }

  // Greedy demand can starve a fold on tiny inputs; move one instance from
  // the largest fold into each empty one.
  for (;;) {
    auto sizes = out.fold_sizes();
    const auto empty = std::find(sizes.begin(), sizes.end(), std::size_t{0});
    if (empty == sizes.end()) break;
    const auto largest = static_cast<std::size_t>(
        std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    for (std::size_t i = n; i-- > 0;) {
      if (out.fold[i] == largest) {
        out.fold[i] = static_cast<std::size_t>(empty - sizes.begin());
        break;
      }
    }
  }
  return out;
}

FoldAssignment iterative_stratification(const Dataset& data, std::size_t folds,
                                        std::uint64_t seed) {
  return iterative_stratification(data.labels, folds, seed);
}

FoldAssignment random_folds(std::size_t n, std::size_t folds, std::uint64_t seed) {
  check_fold_count(n, folds);
  Rng rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  FoldAssignment out;
  out.fold.assign(n, 0);
  out.folds = folds;
  out.seed = seed;
  for (std::size_t r = 0; r < n; ++r) out.fold[order[r]] = r % folds;
  return out;
}

double label_proportion_deviation(const LabelMatrix& labels, const FoldAssignment& folds) {
  const auto n = static_cast<std::size_t>(labels.rows());
  const auto q = static_cast<std::size_t>(labels.cols());
  if (folds.fold.size() != n) throw std::invalid_argument("fold assignment size mismatch");
  const auto sizes = folds.fold_sizes();
  std::vector<std::vector<std::size_t>> positives(folds.folds, std::vector<std::size_t>(q, 0));
  std::vector<std::size_t> total(q, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      if (labels(i, j) != 0) {
        ++positives[folds.fold[i]][j];
        ++total[j];
      }
    }
  }
  double sum = 0.0;
  std::size_t cells = 0;
  for (std::size_t f = 0; f < folds.folds; ++f) {
    if (sizes[f] == 0) continue;
    for (std::size_t j = 0; j < q; ++j) {
      const double overall = static_cast<double>(total[j]) / static_cast<double>(n);
      const double local = static_cast<double>(positives[f][j]) / static_cast<double>(sizes[f]);
      sum += std::abs(local - overall);
      ++cells;
    }
  }
  return cells ? sum / static_cast<double>(cells) : 0.0;
}

}  // namespace mlkfhe
