#pragma once

// HOMER: a hierarchy of multi-label classifiers over recursively clustered
// label sets.

#include <span>
#include <vector>

#include "mlkfhe/binary_learner.hpp"
#include "mlkfhe/clustering.hpp"
#include "mlkfhe/dataset.hpp"

namespace mlkfhe {

struct HomerNode {
  std::vector<std::size_t> labels;    // L_v, sorted
  std::vector<std::size_t> children;  // node indices
  /// meta_models[c] scores the meta-label of children[c]: "the instance has
  /// at least one relevant label in that child's label set".
  std::vector<BinaryModel> meta_models;
  /// Number of training instances kept at this node (those with at least one
  /// relevant label in L_v; every instance for the root).
  std::size_t num_instances = 0;

  bool is_leaf() const { return children.empty(); }
};

struct HomerParams {
  Clustering clustering = Clustering::balanced_kmeans;
  std::size_t k = 2;
};

/// Nodes are stored in depth-first creation order; node 0 is the root.
struct HomerTree {
  std::vector<HomerNode> nodes;
  std::size_t input_dim = 0;
  std::size_t num_labels = 0;

  const HomerNode& root() const { return nodes.front(); }
  std::size_t depth() const;

  /// Per-label scores: the product of meta-scores along the label's
  /// root-to-leaf path, stopping after the first meta-score below 0.5.
  Vector predict(std::span<const double> x) const;
};

/// Trains a HOMER tree. Label sets larger than k are clustered into k groups
/// with `params.clustering`; smaller sets split into singletons. Instances
/// with zero weight are treated as absent. Throws std::invalid_argument when
/// q < 2 or k < 2.
HomerTree train_homer(const Dataset& data, std::span<const double> instance_weights,
                      const HomerParams& params, const BinaryLearnerSpec& spec);

inline Vector predict_homer(const HomerTree& tree, std::span<const double> x) {
  return tree.predict(x);
}

/// Checks the structural invariants (root holds all labels, children
/// partition their parent's labels, leaves are singletons, every label sits
/// in exactly one leaf). Throws std::logic_error describing the violation.
void check_homer_structure(const HomerTree& tree);

}  // namespace mlkfhe
