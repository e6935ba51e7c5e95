#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "mlkfhe/dataset.hpp"
#include "mlkfhe/rng.hpp"

namespace mlkfhe {

enum class Clustering { random, kmeans, balanced_kmeans };

std::string_view to_string(Clustering method);
/// Accepts "random", "kmeans"/"k-means", "balanced"/"balanced-kmeans".
Clustering parse_clustering(std::string_view text);

/// Disjoint label groups; each group sorted, groups ordered by first label.
using LabelGroups = std::vector<std::vector<std::size_t>>;

/// Partitions `label_subset` into exactly min(k, |subset|) nonempty groups.
///
/// Each label is represented by its indicator column over the instances, with
/// distances weighted by `instance_weights`. k-means uses k-means++ seeding
/// and Lloyd iterations; balanced k-means then reassigns labels greedily
/// (largest nearest/second-nearest gap first) into clusters whose sizes differ
/// by at most one. The random method shuffles the labels and scatters them
/// over k groups, each guaranteed nonempty.
///
/// Throws std::invalid_argument for an empty subset, k < 2, or mismatched
/// weights.
LabelGroups cluster_labels(const LabelMatrix& labels, std::span<const double> instance_weights,
                           std::span<const std::size_t> label_subset, Clustering method,
                           std::size_t k, Rng& rng);

/// Convenience overload with uniform weights and a fresh generator.
LabelGroups cluster_labels(const Dataset& data, std::span<const std::size_t> label_subset,
                           Clustering method, std::size_t k, std::uint64_t seed);

}  // namespace mlkfhe
