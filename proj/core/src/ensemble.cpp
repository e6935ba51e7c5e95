#include "mlkfhe/ensemble.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mlkfhe/kalman.hpp"
#include "mlkfhe/logging.hpp"
#include "mlkfhe/metrics.hpp"
#include "mlkfhe/rng.hpp"

namespace mlkfhe {

namespace {

constexpr std::uint64_t kResampleStream = 0x5a;
constexpr std::uint64_t kBootstrapStream = 0xb0;

void require_input(const KfheModel& model, std::size_t dim) {
  if (dim != model.input_dim) {
    throw std::invalid_argument("expected " + std::to_string(model.input_dim) +
                                " features, got " + std::to_string(dim));
  }
}

ComponentDraw draw_for(Family family, std::size_t q, std::uint64_t seed, std::size_t t) {
  Rng rng(derive_seed(seed, {t}));
  return draw_component(family, q, rng);
}

std::span<double> row_of(ScoreMatrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

}  // namespace

std::string_view to_string(Weighting weighting) {
  return weighting == Weighting::resample ? "resample" : "direct";
}

Weighting parse_weighting(std::string_view text) {
  if (text == "resample") return Weighting::resample;
  if (text == "direct") return Weighting::direct;
  throw std::invalid_argument("unknown weighting mode '" + std::string(text) + "'");
}

ComponentTrainer default_trainer(const BinaryLearnerSpec& base) {
  return [base](const Dataset& data, std::span<const double> weights,
                const ComponentDraw& draw) { return train_component(data, weights, draw, base); };
}

std::size_t resample_size(std::size_t n, double fraction) {
  const auto size = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  return std::max<std::size_t>(size, 1);
}

void KfheOptions::validate() const {
  if (components < 1) throw std::invalid_argument("number of components T must be >= 1");
  if (!(sample_fraction > 0.0)) throw std::invalid_argument("sample fraction must be > 0");
  base.validate();
}

void BaggingOptions::validate() const {
  if (components < 1) throw std::invalid_argument("number of components T must be >= 1");
  if (!(sample_fraction > 0.0)) throw std::invalid_argument("sample fraction must be > 0");
  base.validate();
}

// --- shared fusion arithmetic --------------------------------------------------

void fuse_measurement(std::span<double> estimate, std::span<const double> component_scores,
                      double gain) {
  if (estimate.size() != component_scores.size()) {
    throw std::invalid_argument("component score count does not match the estimate");
  }
  std::vector<double> z(estimate.size());
  for (std::size_t j = 0; j < z.size(); ++j) z[j] = (component_scores[j] + estimate[j]) / 2.0;
  measurement_update_inplace(estimate, z, gain);
}

ScoreMatrix kfhe_measurement(const ScoreMatrix& component, const ScoreMatrix& previous) {
  if (component.rows() != previous.rows() || component.cols() != previous.cols()) {
    throw std::invalid_argument("measurement shape mismatch");
  }
  ScoreMatrix z(component.rows(), component.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    z.data()[i] = (component.data()[i] + previous.data()[i]) / 2.0;
  }
  return z;
}

void normalize_weights(std::span<double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0) || !std::isfinite(total)) {
    warn("instance weight vector degenerated; resetting to uniform");
    for (double& w : weights) w = 1.0 / static_cast<double>(weights.size());
    return;
  }
  for (double& w : weights) w /= total;
}

std::vector<double> weight_measurement(std::span<const double> weights,
                                       const LabelMatrix& truth, const ScoreMatrix& estimate) {
  if (weights.size() != static_cast<std::size_t>(truth.rows()) ||
      truth.rows() != estimate.rows() || truth.cols() != estimate.cols()) {
    throw std::invalid_argument("weight measurement shape mismatch");
  }
  const LabelMatrix predicted = threshold_scores(estimate);
  std::vector<double> z(weights.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double loss = per_instance_hamming(row_span(truth, static_cast<Eigen::Index>(i)),
                                             row_span(predicted, static_cast<Eigen::Index>(i)));
    z[i] = weights[i] * std::exp(loss);
  }
  normalize_weights(z);
  return z;
}

// --- ML-KFHE ---------------------------------------------------------------------

KfheTrainingResult train_ml_kfhe(const Dataset& data, const KfheOptions& options) {
  return train_ml_kfhe(data, options, default_trainer(options.base));
}

KfheTrainingResult train_ml_kfhe(const Dataset& data, const KfheOptions& options,
                                 const ComponentTrainer& trainer) {
  options.validate();
  data.validate();
  const std::size_t n = data.size();
  const std::size_t q = data.num_labels();

  KfheTrainingResult result;
  KfheModel& model = result.model;
  model.family = options.family;
  model.seed = options.seed;
  model.input_dim = data.num_features();
  model.num_labels = q;

  // kf-w starts from uniform weights with maximal uncertainty.
  KfwState& kfw = result.weight_state;
  kfw.weights = uniform_weights(n);
  StaticKalmanFilter weight_filter(1.0);

  model.initial_draw = draw_for(options.family, q, options.seed, 0);
  model.initial = trainer(data, kfw.weights, model.initial_draw);
  ScoreMatrix estimate = predict_component(model.initial, data.features);

  StaticKalmanFilter model_filter(1.0);
  const std::size_t draws = resample_size(n, options.sample_fraction);

  for (std::size_t t = 1; t <= options.components; ++t) {
    // kf-m
    ComponentDraw draw = draw_for(options.family, q, options.seed, t);
    std::vector<double> train_weights;
    if (options.weighting == Weighting::resample) {
      Rng rng(derive_seed(options.seed, {t, kResampleStream}));
      train_weights = weighted_resample_counts(kfw.weights, draws, rng);
    } else {
      train_weights = kfw.weights;
    }
    Component component = trainer(data, train_weights, draw);
    const ScoreMatrix scores = predict_component(component, data.features);

    const ScoreMatrix measurement = kfhe_measurement(scores, estimate);
    const double noise = hamming_loss(data.labels, threshold_scores(measurement));
    const double gain = model_filter.update_variance(noise);
    for (Eigen::Index i = 0; i < estimate.rows(); ++i) {
      fuse_measurement(row_of(estimate, i), row_span(scores, i), gain);
    }

    // kf-w, sharing the model filter's measurement noise.
    const std::vector<double> weight_z = weight_measurement(kfw.weights, data.labels, estimate);
    const double weight_gain = weight_filter.update(kfw.weights, weight_z, noise);
    normalize_weights(kfw.weights);
    kfw.variance = weight_filter.variance();

    model.components.push_back(std::move(component));
    model.gains.push_back(gain);
    model.draws.push_back(std::move(draw));
    result.iterations.push_back({t, noise, gain, model_filter.variance(), weight_gain,
                                 weight_filter.variance()});
  }

  result.training_estimate = std::move(estimate);
  return result;
}

Vector predict_ml_kfhe(const KfheModel& model, std::span<const double> x) {
  require_input(model, x.size());
  if (model.gains.size() != model.components.size()) {
    throw std::invalid_argument("KFHE model has mismatched gains and components");
  }
  Vector estimate = predict_component(model.initial, x);
  std::span<double> est{estimate.data(), static_cast<std::size_t>(estimate.size())};
  for (std::size_t t = 0; t < model.components.size(); ++t) {
    const Vector scores = predict_component(model.components[t], x);
    fuse_measurement(est, {scores.data(), static_cast<std::size_t>(scores.size())},
                     model.gains[t]);
  }
  return estimate;
}

ScoreMatrix predict_ml_kfhe(const KfheModel& model, const Matrix& features) {
  ScoreMatrix out(features.rows(), static_cast<Eigen::Index>(model.num_labels));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    out.row(i) = predict_ml_kfhe(model, row_span(features, i)).transpose();
  }
  return out;
}

// --- bagging ---------------------------------------------------------------------

BaggedModel train_bagged(const Dataset& data, const BaggingOptions& options) {
  return train_bagged(data, options, default_trainer(options.base));
}

BaggedModel train_bagged(const Dataset& data, const BaggingOptions& options,
                         const ComponentTrainer& trainer) {
  options.validate();
  data.validate();
  const std::size_t n = data.size();
  const std::size_t q = data.num_labels();

  BaggedModel model;
  model.family = options.family;
  model.seed = options.seed;
  model.input_dim = data.num_features();
  model.num_labels = q;

  const auto uniform = uniform_weights(n);
  model.draws.push_back(draw_for(options.family, q, options.seed, 0));
  model.components.push_back(trainer(data, uniform, model.draws.back()));

  const std::size_t draws = resample_size(n, options.sample_fraction);
  for (std::size_t t = 1; t <= options.components; ++t) {
    model.draws.push_back(draw_for(options.family, q, options.seed, t));
    Rng rng(derive_seed(options.seed, {t, kBootstrapStream}));
    const auto sample = bootstrap_sample(n, draws, rng);
    model.components.push_back(trainer(data, sample_counts(sample, n), model.draws.back()));
  }
  return model;
}

Vector predict_bagged(const BaggedModel& model, std::span<const double> x) {
  if (x.size() != model.input_dim) {
    throw std::invalid_argument("expected " + std::to_string(model.input_dim) +
                                " features, got " + std::to_string(x.size()));
  }
  if (model.components.empty()) throw std::invalid_argument("bagged model has no components");
  Vector sum = Vector::Zero(static_cast<Eigen::Index>(model.num_labels));
  for (const auto& component : model.components) sum += predict_component(component, x);
  return sum / static_cast<double>(model.components.size());
}

ScoreMatrix predict_bagged(const BaggedModel& model, const Matrix& features) {
  ScoreMatrix out(features.rows(), static_cast<Eigen::Index>(model.num_labels));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    out.row(i) = predict_bagged(model, row_span(features, i)).transpose();
  }
  return out;
}

}  // namespace mlkfhe
