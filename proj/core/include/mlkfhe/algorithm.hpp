#pragma once

// Named, configurable training recipes covering every model kind, so the CLI
// and the experiment driver can treat them uniformly.

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mlkfhe/component.hpp"
#include "mlkfhe/ensemble.hpp"

namespace mlkfhe {

enum class AlgorithmKind {
  kfhe_homer,
  kfhe_cc,
  ehomer,  // bagged HOMER
  ecc,     // bagged classifier chains
  homer,
  cc,
  br,
  constant,
};

std::string_view to_string(AlgorithmKind kind);
/// Accepts the to_string names plus "e-homer" and "bagged-cc".
AlgorithmKind parse_algorithm_kind(std::string_view text);

struct AlgorithmSpec {
  std::string name;  // display name; defaults to the kind's name
  AlgorithmKind kind = AlgorithmKind::kfhe_homer;
  std::size_t components = 10;  // ensembles only
  Weighting weighting = Weighting::resample;
  double sample_fraction = 2.0;
  BinaryLearnerSpec base;
  Clustering clustering = Clustering::balanced_kmeans;  // single HOMER
  std::size_t k = 3;                                    // single HOMER

  bool is_ensemble() const;

  /// Applies one key=value hyperparameter. Keys: components (or T),
  /// weighting, fraction, kernel, lambda, rff_dim, gamma, epochs, decay, tol,
  /// clustering, k. Throws std::invalid_argument naming the key.
  void set(std::string_view key, std::string_view value);

  /// Throws std::invalid_argument on out-of-range settings.
  void validate() const;
};

AlgorithmSpec default_algorithm(AlgorithmKind kind);

using TrainedModel = std::variant<KfheModel, BaggedModel, Component>;

struct TrainedAlgorithm {
  AlgorithmSpec spec;
  std::uint64_t seed = 0;
  TrainedModel model;
  std::vector<std::string> label_names;
  std::size_t input_dim = 0;
  std::vector<KfheIteration> log;  // ML-KFHE only
};

TrainedAlgorithm train_algorithm(const Dataset& data, const AlgorithmSpec& spec,
                                 std::uint64_t seed);

std::size_t model_input_dim(const TrainedModel& model);
std::size_t model_num_labels(const TrainedModel& model);

/// Throws std::invalid_argument when the feature count does not match.
ScoreMatrix predict_scores(const TrainedModel& model, const Matrix& features);
ScoreMatrix predict_scores(const TrainedAlgorithm& trained, const Matrix& features);

}  // namespace mlkfhe
