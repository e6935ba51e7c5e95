#pragma once

// Weighted probabilistic binary classifiers used inside HOMER nodes and
// classifier-chain links.
//
// The learner is L2-regularized logistic regression fitted by deterministic
// full-batch gradient descent. The "radial" kernel first maps standardized
// inputs through random Fourier features approximating exp(-gamma |x - x'|^2)
// and then fits the same linear model on the mapped features.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "mlkfhe/types.hpp"

namespace mlkfhe {

enum class Kernel { linear, radial };

std::string_view to_string(Kernel kernel);
/// Accepts "linear" and "radial" (also "rbf"). Throws std::invalid_argument.
Kernel parse_kernel(std::string_view text);

struct BinaryLearnerSpec {
  Kernel kernel = Kernel::linear;
  double lambda = 1e-3;
  std::size_t rff_dim = 256;
  /// Radial bandwidth; values <= 0 select 1 / d.
  double rff_gamma = 0.0;
  std::size_t max_epochs = 500;
  /// Step size at epoch t is eta_0 / (1 + step_decay * t / max_epochs).
  double step_decay = 1.0;
  /// Stop once the loss changes by less than this between epochs.
  double tolerance = 1e-6;
  std::uint64_t seed = 0;

  void validate() const;
};

/// z(x) = sqrt(2 / D) cos(W x + b), W ~ N(0, 2 gamma I), b ~ U[0, 2 pi).
/// The projection is regenerated from (input_dim, output_dim, gamma, seed).
class RandomFeatureMap {
 public:
  RandomFeatureMap(std::size_t input_dim, std::size_t output_dim, double gamma,
                   std::uint64_t seed);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return output_dim_; }
  double gamma() const { return gamma_; }
  std::uint64_t seed() const { return seed_; }

  void apply(std::span<const double> x, std::span<double> out) const;
  Vector operator()(std::span<const double> x) const;

 private:
  std::size_t input_dim_;
  std::size_t output_dim_;
  double gamma_;
  std::uint64_t seed_;
  Matrix projection_;  // output_dim x input_dim
  Vector offsets_;
};

/// Per-column standardization, optionally followed by a random feature map.
struct FeatureTransform {
  Vector center;
  Vector scale;  // multiplicative; 0 for columns that were constant in training
  std::optional<RandomFeatureMap> rff;

  std::size_t input_dim() const { return static_cast<std::size_t>(center.size()); }
  std::size_t output_dim() const;

  Vector apply(std::span<const double> x) const;
};

/// Weighted L2-regularized logistic loss over a fixed design matrix:
///   sum_i w_i [log(1 + e^{s_i}) - y_i s_i] + lambda/2 |beta|^2,
///   s_i = beta . z_i + bias.
/// Parameters are packed as [beta..., bias]; the bias is not regularized.
/// Weights are used as given (no normalization).
class LogisticObjective {
 public:
  LogisticObjective(const Matrix& design, std::span<const std::uint8_t> targets,
                    std::span<const double> weights, double lambda);

  std::size_t num_params() const { return static_cast<std::size_t>(design_.cols()) + 1; }

  double value(const Vector& params) const;
  double value_and_gradient(const Vector& params, Vector& gradient) const;

  /// Upper bound on the gradient's Lipschitz constant.
  double lipschitz_bound() const;

 private:
  const Matrix& design_;
  Vector targets_;
  Vector weights_;
  double lambda_;
};

class BinaryModel {
 public:
  /// A model that ignores its input and always returns `score`.
  static BinaryModel constant(double score, std::size_t input_dim);

  BinaryModel(FeatureTransform transform, Vector coefficients, double bias);

  /// Sigmoid of the linear response, in [0, 1]. Throws std::invalid_argument
  /// when x has the wrong dimension.
  double predict_score(std::span<const double> x) const;

  std::size_t input_dim() const { return input_dim_; }
  bool is_constant() const { return constant_.has_value(); }
  std::optional<double> constant_score() const { return constant_; }
  const FeatureTransform& transform() const { return transform_; }
  const Vector& coefficients() const { return coefficients_; }
  double bias() const { return bias_; }

 private:
  BinaryModel() = default;

  std::size_t input_dim_ = 0;
  std::optional<double> constant_;
  FeatureTransform transform_;
  Vector coefficients_;
  double bias_ = 0.0;
};

/// Fits a weighted binary model. Rows with zero weight are ignored. If all
/// weighted targets belong to one class the result is a constant model
/// emitting that class prior. Throws std::invalid_argument on empty input,
/// size mismatches, negative or all-zero weights, or targets outside {0, 1}.
BinaryModel fit_binary(const Matrix& features, std::span<const std::uint8_t> targets,
                       std::span<const double> instance_weights,
                       const BinaryLearnerSpec& spec);

double sigmoid(double s);

}  // namespace mlkfhe
