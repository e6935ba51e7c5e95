#include "mlkfhe/multilabel.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace mlkfhe {

namespace {

void require_weights(const Dataset& data, std::span<const double> weights) {
  if (weights.size() != data.size()) {
    throw std::invalid_argument("instance weight count (" + std::to_string(weights.size()) +
                                ") does not match dataset size (" +
                                std::to_string(data.size()) + ")");
  }
}

void require_dim(std::span<const double> x, std::size_t expected) {
  if (x.size() != expected) {
    throw std::invalid_argument("expected " + std::to_string(expected) +
                                " features, got " + std::to_string(x.size()));
  }
}

}  // namespace

std::vector<std::uint8_t> label_column(const LabelMatrix& labels, std::size_t j) {
  std::vector<std::uint8_t> col(static_cast<std::size_t>(labels.rows()));
  for (Eigen::Index i = 0; i < labels.rows(); ++i) {
    col[static_cast<std::size_t>(i)] = labels(i, static_cast<Eigen::Index>(j));
  }
  return col;
}

void validate_permutation(std::span<const std::size_t> order, std::size_t q) {
  if (order.size() != q) {
    throw std::invalid_argument("chain order has " + std::to_string(order.size()) +
                                " entries, expected " + std::to_string(q));
  }
  std::vector<bool> seen(q, false);
  for (std::size_t v : order) {
    if (v >= q || seen[v]) throw std::invalid_argument("chain order is not a permutation");
    seen[v] = true;
  }
}

std::vector<std::size_t> random_permutation(std::size_t q, Rng& rng) {
  std::vector<std::size_t> order(q);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  return order;
}

// --- binary relevance -------------------------------------------------------

Vector BinaryRelevanceModel::predict(std::span<const double> x) const {
  require_dim(x, input_dim);
  Vector out(static_cast<Eigen::Index>(models.size()));
  for (std::size_t j = 0; j < models.size(); ++j) {
    out[static_cast<Eigen::Index>(j)] = models[j].predict_score(x);
  }
  return out;
}

BinaryRelevanceModel train_br(const Dataset& data, std::span<const double> instance_weights,
                              const BinaryLearnerSpec& spec) {
  data.validate();
  require_weights(data, instance_weights);
  BinaryRelevanceModel model;
  model.input_dim = data.num_features();
  for (std::size_t j = 0; j < data.num_labels(); ++j) {
    BinaryLearnerSpec label_spec = spec;
    label_spec.seed = derive_seed(spec.seed, {j});
    model.models.push_back(
        fit_binary(data.features, label_column(data.labels, j), instance_weights, label_spec));
  }
  return model;
}

// --- classifier chains --------------------------------------------------------

Vector ChainModel::predict(std::span<const double> x) const {
  require_dim(x, input_dim);
  std::vector<double> augmented(x.begin(), x.end());
  augmented.reserve(input_dim + order.size());
  Vector out(static_cast<Eigen::Index>(order.size()));
  for (std::size_t l = 0; l < order.size(); ++l) {
    const double score = models[l].predict_score(augmented);
    out[static_cast<Eigen::Index>(order[l])] = score;
    augmented.push_back(static_cast<double>(threshold_score(score)));
  }
  return out;
}

ChainModel train_cc(const Dataset& data, std::span<const double> instance_weights,
                    std::span<const std::size_t> order, const BinaryLearnerSpec& spec) {
  data.validate();
  require_weights(data, instance_weights);
  const std::size_t q = data.num_labels();
  validate_permutation(order, q);

  ChainModel model;
  model.order.assign(order.begin(), order.end());
  model.input_dim = data.num_features();

  const auto n = static_cast<Eigen::Index>(data.size());
  const auto d = static_cast<Eigen::Index>(data.num_features());
  Matrix augmented(n, d + static_cast<Eigen::Index>(q));
  augmented.leftCols(d) = data.features;

  for (std::size_t l = 0; l < q; ++l) {
    BinaryLearnerSpec position_spec = spec;
    position_spec.seed = derive_seed(spec.seed, {l});
    const Matrix inputs = augmented.leftCols(d + static_cast<Eigen::Index>(l));
    model.models.push_back(fit_binary(inputs, label_column(data.labels, order[l]),
                                      instance_weights, position_spec));
    for (Eigen::Index i = 0; i < n; ++i) {
      augmented(i, d + static_cast<Eigen::Index>(l)) =
          data.labels(i, static_cast<Eigen::Index>(order[l]));
    }
  }
  return model;
}

// --- constant prior -----------------------------------------------------------

Vector ConstantModel::predict(std::span<const double> x) const {
  require_dim(x, input_dim);
  return scores;
}

ConstantModel train_constant(const Dataset& data, std::span<const double> instance_weights) {
  data.validate();
  require_weights(data, instance_weights);
  double total = 0.0;
  for (double w : instance_weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("weights must be >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("total weight is zero");
  ConstantModel model;
  model.input_dim = data.num_features();
  model.scores = Vector::Zero(static_cast<Eigen::Index>(data.num_labels()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < data.num_labels(); ++j) {
      model.scores[static_cast<Eigen::Index>(j)] +=
          instance_weights[i] * data.labels(static_cast<Eigen::Index>(i),
                                            static_cast<Eigen::Index>(j));
    }
  }
  model.scores = (model.scores / total).cwiseMin(1.0);
  return model;
}

}  // namespace mlkfhe
