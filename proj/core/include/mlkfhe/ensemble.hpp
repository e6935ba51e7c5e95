#pragma once

// ML-KFHE: sequential fusion of multi-label components with two static
// Kalman filters, plus the bagged baselines (E-HOMER, ensemble CC).
//
// The model filter (kf-m) tracks the ensemble's score matrix on the training
// data. Each new component contributes the measurement (h_t(D) + y_{t-1}) / 2,
// whose noise is the Hamming loss of that measurement. The weight filter
// (kf-w) tracks the instance distribution used to resample training data for
// the next component; its measurement scales each weight by
// exp(per-instance Hamming loss of the current ensemble).

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mlkfhe/component.hpp"
#include "mlkfhe/dataset.hpp"

namespace mlkfhe {

enum class Weighting {
  resample,  // train on a weighted resample (as counts) drawn from the weights
  direct,    // pass the weights to the learner unchanged
};

std::string_view to_string(Weighting weighting);
Weighting parse_weighting(std::string_view text);

/// Trains one component on `data` under `instance_weights`.
using ComponentTrainer = std::function<Component(
    const Dataset& data, std::span<const double> instance_weights, const ComponentDraw& draw)>;

ComponentTrainer default_trainer(const BinaryLearnerSpec& base);

struct KfheOptions {
  std::size_t components = 10;  // T, not counting the initial component
  Family family = Family::homer;
  std::uint64_t seed = 0;
  Weighting weighting = Weighting::resample;
  double sample_fraction = 2.0;  // resample size relative to n
  BinaryLearnerSpec base;

  void validate() const;
};

struct KfheModel {
  Family family = Family::homer;
  Component initial = ConstantModel{};
  std::vector<Component> components;  // h_1..h_T
  std::vector<double> gains;          // k_1..k_T
  ComponentDraw initial_draw;
  std::vector<ComponentDraw> draws;
  std::uint64_t seed = 0;
  std::size_t input_dim = 0;
  std::size_t num_labels = 0;
};

struct KfwState {
  std::vector<double> weights;
  double variance = 1.0;
};

/// Per-iteration filter bookkeeping, for logs and diagnostics.
struct KfheIteration {
  std::size_t t = 0;
  double model_noise = 0.0;     // r_t
  double model_gain = 0.0;      // k_t
  double model_variance = 0.0;  // p_t after the update
  double weight_gain = 0.0;
  double weight_variance = 0.0;
};

struct KfheTrainingResult {
  KfheModel model;
  std::vector<KfheIteration> iterations;
  ScoreMatrix training_estimate;  // y_T on the training data
  KfwState weight_state;
};

/// Throws std::invalid_argument for T < 1 or an invalid dataset.
KfheTrainingResult train_ml_kfhe(const Dataset& data, const KfheOptions& options);
KfheTrainingResult train_ml_kfhe(const Dataset& data, const KfheOptions& options,
                                 const ComponentTrainer& trainer);

Vector predict_ml_kfhe(const KfheModel& model, std::span<const double> x);
ScoreMatrix predict_ml_kfhe(const KfheModel& model, const Matrix& features);

/// The fusion step shared by training and prediction:
/// z = (h + y) / 2, y <- y + k (z - y).
void fuse_measurement(std::span<double> estimate, std::span<const double> component_scores,
                      double gain);

/// Elementwise (component + previous) / 2.
ScoreMatrix kfhe_measurement(const ScoreMatrix& component, const ScoreMatrix& previous);

/// w_i exp(hloss_i) normalized to sum 1, where hloss_i is the Hamming loss of
/// the thresholded estimate row i. Falls back to uniform (with a warning) if
/// the mass vanishes.
std::vector<double> weight_measurement(std::span<const double> weights,
                                       const LabelMatrix& truth, const ScoreMatrix& estimate);

/// Rescales to sum 1; resets to uniform with a warning if the sum is not
/// positive.
void normalize_weights(std::span<double> weights);

struct BaggingOptions {
  std::size_t components = 10;  // T; the model holds T + 1 components
  Family family = Family::homer;
  std::uint64_t seed = 0;
  double sample_fraction = 2.0;
  BinaryLearnerSpec base;

  void validate() const;
};

struct BaggedModel {
  Family family = Family::homer;
  std::vector<Component> components;  // h_0..h_T
  std::vector<ComponentDraw> draws;
  std::uint64_t seed = 0;
  std::size_t input_dim = 0;
  std::size_t num_labels = 0;
};

/// h_0 is trained on the full data; h_1..h_T each on a uniform bootstrap
/// sample of size sample_fraction * n with a fresh hyperparameter draw.
BaggedModel train_bagged(const Dataset& data, const BaggingOptions& options);
BaggedModel train_bagged(const Dataset& data, const BaggingOptions& options,
                         const ComponentTrainer& trainer);

/// Mean of all T + 1 component score vectors.
Vector predict_bagged(const BaggedModel& model, std::span<const double> x);
ScoreMatrix predict_bagged(const BaggedModel& model, const Matrix& features);

/// round(fraction * n), at least 1.
std::size_t resample_size(std::size_t n, double fraction);

}  // namespace mlkfhe
