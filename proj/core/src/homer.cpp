#include "mlkfhe/homer.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mlkfhe/rng.hpp"

namespace mlkfhe {

namespace {

class HomerBuilder {
 public:
  HomerBuilder(const Dataset& data, std::span<const double> weights, const HomerParams& params,
               const BinaryLearnerSpec& spec, HomerTree& tree)
      : data_(data), weights_(weights), params_(params), spec_(spec), tree_(tree) {}

  void build(std::size_t v, const std::vector<std::size_t>& rows) {
    const std::vector<std::size_t> node_labels = tree_.nodes[v].labels;
    if (node_labels.size() == 1) return;

    LabelMatrix node_y(static_cast<Eigen::Index>(rows.size()), data_.labels.cols());
    Matrix node_x(static_cast<Eigen::Index>(rows.size()), data_.features.cols());
    std::vector<double> node_w(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      node_y.row(static_cast<Eigen::Index>(r)) =
          data_.labels.row(static_cast<Eigen::Index>(rows[r]));
      node_x.row(static_cast<Eigen::Index>(r)) =
          data_.features.row(static_cast<Eigen::Index>(rows[r]));
      node_w[r] = weights_[rows[r]];
    }

    Rng rng(derive_seed(spec_.seed, {v, 0xc1u}));
    const LabelGroups groups =
        cluster_labels(node_y, node_w, node_labels, params_.clustering, params_.k, rng);

    std::vector<std::vector<std::size_t>> child_rows(groups.size());
    for (std::size_t c = 0; c < groups.size(); ++c) {
      std::vector<std::uint8_t> meta(rows.size(), 0);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t label : groups[c]) {
          if (node_y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(label))) {
            meta[r] = 1;
            break;
          }
        }
        if (meta[r]) child_rows[c].push_back(rows[r]);
      }

      BinaryLearnerSpec child_spec = spec_;
      child_spec.seed = derive_seed(spec_.seed, {v, c});
      BinaryModel model = rows.empty()
                              ? BinaryModel::constant(0.0, data_.num_features())
                              : fit_binary(node_x, meta, node_w, child_spec);

      HomerNode child;
      child.labels = groups[c];
      child.num_instances = child_rows[c].size();
      tree_.nodes.push_back(std::move(child));
      tree_.nodes[v].children.push_back(tree_.nodes.size() - 1);
      tree_.nodes[v].meta_models.push_back(std::move(model));
    }

    const std::vector<std::size_t> children = tree_.nodes[v].children;
    for (std::size_t c = 0; c < children.size(); ++c) build(children[c], child_rows[c]);
  }

 private:
  const Dataset& data_;
  std::span<const double> weights_;
  const HomerParams& params_;
  const BinaryLearnerSpec& spec_;
  HomerTree& tree_;
};

}  // namespace

HomerTree train_homer(const Dataset& data, std::span<const double> instance_weights,
                      const HomerParams& params, const BinaryLearnerSpec& spec) {
  data.validate();
  if (data.num_labels() < 2) throw std::invalid_argument("HOMER needs at least 2 labels");
  if (params.k < 2) throw std::invalid_argument("HOMER cluster count must be >= 2");
  if (instance_weights.size() != data.size()) {
    throw std::invalid_argument("instance weights do not match dataset size");
  }

  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!(instance_weights[i] >= 0.0)) throw std::invalid_argument("weights must be >= 0");
    if (instance_weights[i] > 0.0) rows.push_back(i);
  }
  if (rows.empty()) throw std::invalid_argument("total instance weight is zero");

  HomerTree tree;
  tree.input_dim = data.num_features();
  tree.num_labels = data.num_labels();
  HomerNode root;
  root.labels.resize(data.num_labels());
  std::iota(root.labels.begin(), root.labels.end(), std::size_t{0});
  root.num_instances = rows.size();
  tree.nodes.push_back(std::move(root));

  HomerBuilder(data, instance_weights, params, spec, tree).build(0, rows);
  return tree;
}

std::size_t HomerTree::depth() const {
  std::function<std::size_t(std::size_t)> walk = [&](std::size_t v) -> std::size_t {
    std::size_t deepest = 0;
    for (std::size_t c : nodes[v].children) deepest = std::max(deepest, 1 + walk(c));
    return deepest;
  };
  return nodes.empty() ? 0 : walk(0);
}

Vector HomerTree::predict(std::span<const double> x) const {
  if (x.size() != input_dim) {
    throw std::invalid_argument("expected " + std::to_string(input_dim) + " features, got " +
                                std::to_string(x.size()));
  }
  Vector scores = Vector::Zero(static_cast<Eigen::Index>(num_labels));
  std::function<void(std::size_t, double)> visit = [&](std::size_t v, double product) {
    const HomerNode& node = nodes[v];
    for (std::size_t c = 0; c < node.children.size(); ++c) {
      const double s = node.meta_models[c].predict_score(x);
      const double path = product * s;
      const HomerNode& child = nodes[node.children[c]];
      if (child.is_leaf() || threshold_score(s) == 0) {
        for (std::size_t label : child.labels) scores[static_cast<Eigen::Index>(label)] = path;
      } else {
        visit(node.children[c], path);
      }
    }
  };
  if (!nodes.empty()) visit(0, 1.0);
  return scores;
}

void check_homer_structure(const HomerTree& tree) {
  if (tree.nodes.empty()) throw std::logic_error("HOMER tree has no nodes");
  const HomerNode& root = tree.root();
  if (root.labels.size() != tree.num_labels) {
    throw std::logic_error("root does not hold every label");
  }
  std::vector<int> leaf_hits(tree.num_labels, 0);
  for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
    const HomerNode& node = tree.nodes[v];
    if (node.meta_models.size() != node.children.size()) {
      throw std::logic_error("node " + std::to_string(v) + " has mismatched meta models");
    }
    if (node.is_leaf()) {
      if (node.labels.size() != 1) {
        throw std::logic_error("leaf " + std::to_string(v) + " holds " +
                               std::to_string(node.labels.size()) + " labels");
      }
      ++leaf_hits.at(node.labels.front());
      continue;
    }
    std::vector<std::size_t> merged;
    for (std::size_t c : node.children) {
      const auto& child = tree.nodes.at(c);
      if (child.labels.empty()) throw std::logic_error("empty child label set");
      if (child.num_instances > node.num_instances) {
        throw std::logic_error("child keeps more instances than its parent");
      }
      merged.insert(merged.end(), child.labels.begin(), child.labels.end());
    }
    std::sort(merged.begin(), merged.end());
    if (std::adjacent_find(merged.begin(), merged.end()) != merged.end()) {
      throw std::logic_error("children of node " + std::to_string(v) + " overlap");
    }
    std::vector<std::size_t> own = node.labels;
    std::sort(own.begin(), own.end());
    if (merged != own) {
      throw std::logic_error("children of node " + std::to_string(v) +
                             " do not partition its labels");
    }
  }
  for (std::size_t l = 0; l < leaf_hits.size(); ++l) {
    if (leaf_hits[l] != 1) {
      throw std::logic_error("label " + std::to_string(l) + " appears in " +
                             std::to_string(leaf_hits[l]) + " leaves");
    }
  }
}

}  // namespace mlkfhe
