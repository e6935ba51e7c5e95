#include "mlkfhe/binary_learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlkfhe/rng.hpp"

namespace mlkfhe {

std::string_view to_string(Kernel kernel) {
  return kernel == Kernel::linear ? "linear" : "radial";
}

Kernel parse_kernel(std::string_view text) {
  if (text == "linear") return Kernel::linear;
  if (text == "radial" || text == "rbf") return Kernel::radial;
  throw std::invalid_argument("unknown kernel '" + std::string(text) + "'");
}

void BinaryLearnerSpec::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  if (kernel == Kernel::radial && rff_dim == 0) {
    throw std::invalid_argument("rff_dim must be > 0 for the radial kernel");
  }
  if (max_epochs == 0) throw std::invalid_argument("max_epochs must be > 0");
  if (!(step_decay >= 0.0)) throw std::invalid_argument("step_decay must be >= 0");
  if (!(tolerance >= 0.0)) throw std::invalid_argument("tolerance must be >= 0");
}

double sigmoid(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

namespace {

// log(1 + e^s) without overflow.
double softplus(double s) {
  return std::max(s, 0.0) + std::log1p(std::exp(-std::abs(s)));
}

}  // namespace

// ---------------------------------------------------------------------------

RandomFeatureMap::RandomFeatureMap(std::size_t input_dim, std::size_t output_dim,
                                   double gamma, std::uint64_t seed)
    : input_dim_(input_dim), output_dim_(output_dim), gamma_(gamma), seed_(seed) {
  if (output_dim == 0) throw std::invalid_argument("random feature dim must be > 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("radial gamma must be > 0");
  Rng rng(seed);
  const double stddev = std::sqrt(2.0 * gamma);
  projection_.resize(static_cast<Eigen::Index>(output_dim),
                     static_cast<Eigen::Index>(input_dim));
  for (Eigen::Index i = 0; i < projection_.size(); ++i) {
    projection_.data()[i] = stddev * rng.normal();
  }
  offsets_.resize(static_cast<Eigen::Index>(output_dim));
  for (Eigen::Index i = 0; i < offsets_.size(); ++i) {
    offsets_[i] = 2.0 * std::numbers::pi * rng.uniform();
  }
}

void RandomFeatureMap::apply(std::span<const double> x, std::span<double> out) const {
  if (x.size() != input_dim_ || out.size() != output_dim_) {
    throw std::invalid_argument("random feature map dimension mismatch");
  }
  const double norm = std::sqrt(2.0 / static_cast<double>(output_dim_));
  for (std::size_t r = 0; r < output_dim_; ++r) {
    const double* w = projection_.data() + r * input_dim_;
    double acc = offsets_[static_cast<Eigen::Index>(r)];
    for (std::size_t c = 0; c < input_dim_; ++c) acc += w[c] * x[c];
    out[r] = norm * std::cos(acc);
  }
}

Vector RandomFeatureMap::operator()(std::span<const double> x) const {
  Vector out(static_cast<Eigen::Index>(output_dim_));
  apply(x, {out.data(), output_dim_});
  return out;
}

// ---------------------------------------------------------------------------

std::size_t FeatureTransform::output_dim() const {
  return rff ? rff->output_dim() : input_dim();
}

Vector FeatureTransform::apply(std::span<const double> x) const {
  if (x.size() != input_dim()) {
    throw std::invalid_argument("expected " + std::to_string(input_dim()) +
                                " features, got " + std::to_string(x.size()));
  }
  Vector standardized(center.size());
  for (Eigen::Index j = 0; j < center.size(); ++j) {
    standardized[j] = (x[static_cast<std::size_t>(j)] - center[j]) * scale[j];
  }
  if (!rff) return standardized;
  return (*rff)({standardized.data(), static_cast<std::size_t>(standardized.size())});
}

// ---------------------------------------------------------------------------

LogisticObjective::LogisticObjective(const Matrix& design,
                                     std::span<const std::uint8_t> targets,
                                     std::span<const double> weights, double lambda)
    : design_(design), lambda_(lambda) {
  const auto n = static_cast<std::size_t>(design.rows());
  if (targets.size() != n || weights.size() != n) {
    throw std::invalid_argument("objective: targets/weights do not match design rows");
  }
  targets_.resize(design.rows());
  weights_.resize(design.rows());
  for (std::size_t i = 0; i < n; ++i) {
    targets_[static_cast<Eigen::Index>(i)] = targets[i];
    weights_[static_cast<Eigen::Index>(i)] = weights[i];
  }
}

double LogisticObjective::value(const Vector& params) const {
  Vector unused;
  return value_and_gradient(params, unused);
}

double LogisticObjective::value_and_gradient(const Vector& params, Vector& gradient) const {
  const Eigen::Index p = design_.cols();
  if (params.size() != p + 1) throw std::invalid_argument("objective: parameter size");
  const auto beta = params.head(p);
  const double bias = params[p];

  const Vector response = (design_ * beta).array() + bias;
  Vector residual(response.size());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < response.size(); ++i) {
    const double s = response[i];
    loss += weights_[i] * (softplus(s) - targets_[i] * s);
    residual[i] = weights_[i] * (sigmoid(s) - targets_[i]);
  }
  loss += 0.5 * lambda_ * beta.squaredNorm();

  gradient.resize(p + 1);
  gradient.head(p) = design_.transpose() * residual + lambda_ * beta;
  gradient[p] = residual.sum();
  return loss;
}

double LogisticObjective::lipschitz_bound() const {
  // Hessian <= 1/4 Z~^T W Z~ + lambda I with Z~ = [Z 1]. The trace of the
  // weighted Gram matrix bounds its top eigenvalue; power iteration gives a
  // much tighter estimate, padded so that it stays an upper bound in practice.
  const Eigen::Index p = design_.cols();
  double trace = weights_.sum();
  for (Eigen::Index i = 0; i < design_.rows(); ++i) {
    trace += weights_[i] * design_.row(i).squaredNorm();
  }

  Vector v = Vector::Ones(p + 1) / std::sqrt(static_cast<double>(p + 1));
  double eigen = 0.0;
  for (int it = 0; it < 30; ++it) {
    const Vector zv = (design_ * v.head(p)).array() + v[p];
    const Vector wzv = weights_.cwiseProduct(zv);
    Vector next(p + 1);
    next.head(p) = design_.transpose() * wzv;
    next[p] = wzv.sum();
    const double norm = next.norm();
    if (norm <= 0.0) break;
    eigen = norm;
    v = next / norm;
  }
  const double top = std::min(trace, 1.5 * eigen);
  return 0.25 * std::max(top, std::numeric_limits<double>::min()) + lambda_;
}

// ---------------------------------------------------------------------------

BinaryModel BinaryModel::constant(double score, std::size_t input_dim) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw std::invalid_argument("constant score must lie in [0, 1]");
  }
  BinaryModel m;
  m.input_dim_ = input_dim;
  m.constant_ = score;
  return m;
}

BinaryModel::BinaryModel(FeatureTransform transform, Vector coefficients, double bias)
    : input_dim_(transform.input_dim()),
      transform_(std::move(transform)),
      coefficients_(std::move(coefficients)),
      bias_(bias) {
  if (static_cast<std::size_t>(coefficients_.size()) != transform_.output_dim()) {
    throw std::invalid_argument("coefficient count does not match transform output");
  }
  if (transform_.scale.size() != transform_.center.size()) {
    throw std::invalid_argument("transform center/scale size mismatch");
  }
}

double BinaryModel::predict_score(std::span<const double> x) const {
  if (x.size() != input_dim_) {
    throw std::invalid_argument("expected " + std::to_string(input_dim_) +
                                " features, got " + std::to_string(x.size()));
  }
  if (constant_) return *constant_;
  const Vector z = transform_.apply(x);
  return sigmoid(coefficients_.dot(z) + bias_);
}

// ---------------------------------------------------------------------------

BinaryModel fit_binary(const Matrix& features, std::span<const std::uint8_t> targets,
                       std::span<const double> instance_weights,
                       const BinaryLearnerSpec& spec) {
  spec.validate();
  const auto n = static_cast<std::size_t>(features.rows());
  const auto d = static_cast<std::size_t>(features.cols());
  if (n == 0) throw std::invalid_argument("fit_binary: no training instances");
  if (targets.size() != n || instance_weights.size() != n) {
    throw std::invalid_argument("fit_binary: targets/weights do not match feature rows");
  }

  double total = 0.0;
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(instance_weights[i] >= 0.0) || !std::isfinite(instance_weights[i])) {
      throw std::invalid_argument("fit_binary: weights must be finite and >= 0");
    }
    if (targets[i] > 1) throw std::invalid_argument("fit_binary: targets must be 0 or 1");
    if (instance_weights[i] > 0.0) {
      active.push_back(i);
      total += instance_weights[i];
    }
  }
  if (!(total > 0.0)) throw std::invalid_argument("fit_binary: total weight is zero");

  const auto m = static_cast<Eigen::Index>(active.size());
  std::vector<double> w(active.size());
  std::vector<std::uint8_t> y(active.size());
  double prior = 0.0;
  for (std::size_t a = 0; a < active.size(); ++a) {
    w[a] = instance_weights[active[a]] / total;
    y[a] = targets[active[a]];
    prior += w[a] * y[a];
  }
  const bool all_negative = std::all_of(y.begin(), y.end(), [](auto v) { return v == 0; });
  const bool all_positive = std::all_of(y.begin(), y.end(), [](auto v) { return v == 1; });
  if (all_negative) return BinaryModel::constant(0.0, d);
  if (all_positive) return BinaryModel::constant(1.0, d);

  // Weighted standardization.
  FeatureTransform transform;
  transform.center = Vector::Zero(static_cast<Eigen::Index>(d));
  transform.scale = Vector::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t a = 0; a < active.size(); ++a) {
    transform.center += w[a] * features.row(static_cast<Eigen::Index>(active[a])).transpose();
  }
  Vector variance = Vector::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t a = 0; a < active.size(); ++a) {
    const Vector diff =
        features.row(static_cast<Eigen::Index>(active[a])).transpose() - transform.center;
    variance += w[a] * diff.cwiseProduct(diff);
  }
  for (Eigen::Index j = 0; j < variance.size(); ++j) {
    transform.scale[j] = variance[j] > 1e-24 ? 1.0 / std::sqrt(variance[j]) : 0.0;
  }
  if (spec.kernel == Kernel::radial) {
    const double gamma = spec.rff_gamma > 0.0
                             ? spec.rff_gamma
                             : 1.0 / static_cast<double>(std::max<std::size_t>(d, 1));
    transform.rff.emplace(d, spec.rff_dim, gamma, derive_seed(spec.seed, {0x5f}));
  }

  const auto p = static_cast<Eigen::Index>(transform.output_dim());
  Matrix design(m, p);
  for (Eigen::Index a = 0; a < m; ++a) {
    design.row(a) = transform.apply(row_span(features, static_cast<Eigen::Index>(
                                                           active[static_cast<std::size_t>(a)])))
                        .transpose();
  }

  LogisticObjective objective(design, y, w, spec.lambda);
  const double eta0 = 1.0 / objective.lipschitz_bound();

  Vector params = Vector::Zero(p + 1);
  params[p] = std::log(prior / (1.0 - prior));
  Vector gradient;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t epoch = 0; epoch < spec.max_epochs; ++epoch) {
    const double loss = objective.value_and_gradient(params, gradient);
    if (std::abs(previous - loss) < spec.tolerance) break;
    previous = loss;
    const double eta = eta0 / (1.0 + spec.step_decay * static_cast<double>(epoch) /
                                         static_cast<double>(spec.max_epochs));
    params -= eta * gradient;
  }

  Vector coefficients = params.head(p);
  return BinaryModel(std::move(transform), std::move(coefficients), params[p]);
}

}  // namespace mlkfhe
