#pragma once

// Type-erased component classifiers fused by the ensembles, and the random
// hyperparameter draws that diversify them.

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "mlkfhe/binary_learner.hpp"
#include "mlkfhe/clustering.hpp"
#include "mlkfhe/homer.hpp"
#include "mlkfhe/multilabel.hpp"

namespace mlkfhe {

enum class Family { homer, cc };

std::string_view to_string(Family family);
Family parse_family(std::string_view text);

using Component = std::variant<HomerTree, ChainModel, BinaryRelevanceModel, ConstantModel>;

Vector predict_component(const Component& component, std::span<const double> x);

/// Row-by-row scores; identical to calling the single-row overload per row.
ScoreMatrix predict_component(const Component& component, const Matrix& features);

std::size_t component_input_dim(const Component& component);
std::size_t component_num_labels(const Component& component);

/// Hyperparameters of one component. HOMER uses clustering/k/kernel, CC uses
/// order/kernel.
struct ComponentDraw {
  Family family = Family::homer;
  Kernel kernel = Kernel::linear;
  Clustering clustering = Clustering::balanced_kmeans;
  std::size_t k = 2;
  std::vector<std::size_t> order;
  std::uint64_t seed = 0;

  bool operator==(const ComponentDraw&) const = default;
};

/// ceil(sqrt(q)), at least 2.
std::size_t max_homer_clusters(std::size_t q);

/// Uniform draw over {random, k-means, balanced k-means} x {2..ceil(sqrt q)}
/// x {linear, radial} for HOMER, or a uniform random chain order x
/// {linear, radial} for CC. The component seed is taken from the generator.
ComponentDraw draw_component(Family family, std::size_t q, Rng& rng);

Component train_component(const Dataset& data, std::span<const double> instance_weights,
                          const ComponentDraw& draw, const BinaryLearnerSpec& base);

}  // namespace mlkfhe
