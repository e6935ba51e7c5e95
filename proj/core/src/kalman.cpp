#include "mlkfhe/kalman.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mlkfhe {

namespace {

void require_gain(double k) {
  if (!(k >= 0.0 && k <= 1.0)) {
    throw std::invalid_argument("Kalman gain must lie in [0, 1], got " +
                                std::to_string(k));
  }
}

}  // namespace

double kalman_gain(double p, double r) {
  if (!(p >= 0.0)) {
    throw std::invalid_argument("estimate variance must be >= 0, got " +
                                std::to_string(p));
  }
  if (!(r >= 0.0)) {
    throw std::invalid_argument("measurement noise must be >= 0, got " +
                                std::to_string(r));
  }
  const double total = p + r;
  if (total < kDegenerateVariance) return 0.0;
  return p / total;
}

double variance_update(double p, double k) {
  if (!(p >= 0.0)) {
    throw std::invalid_argument("estimate variance must be >= 0, got " +
                                std::to_string(p));
  }
  require_gain(k);
  return (1.0 - k) * p;
}

std::vector<double> measurement_update(std::span<const double> prev,
                                       std::span<const double> z, double k) {
  std::vector<double> out(prev.begin(), prev.end());
  measurement_update_inplace(out, z, k);
  return out;
}

void measurement_update_inplace(std::span<double> prev,
                                std::span<const double> z, double k) {
  if (prev.size() != z.size()) {
    throw std::invalid_argument("measurement shape mismatch: " +
                                std::to_string(prev.size()) + " vs " +
                                std::to_string(z.size()));
  }
  require_gain(k);
  for (std::size_t i = 0; i < prev.size(); ++i) {
    prev[i] = prev[i] + k * (z[i] - prev[i]);
  }
}

Matrix measurement_update(const Matrix& prev, const Matrix& z, double k) {
  if (prev.rows() != z.rows() || prev.cols() != z.cols()) {
    throw std::invalid_argument("measurement shape mismatch");
  }
  require_gain(k);
  Matrix out = prev;
  measurement_update_inplace({out.data(), static_cast<std::size_t>(out.size())},
                             {z.data(), static_cast<std::size_t>(z.size())}, k);
  return out;
}

StaticKalmanFilter::StaticKalmanFilter(double initial_variance)
    : variance_(initial_variance) {
  if (!(initial_variance >= 0.0)) {
    throw std::invalid_argument("initial variance must be >= 0");
  }
}

double StaticKalmanFilter::update_variance(double r) {
  const double k = kalman_gain(variance_, r);
  variance_ = variance_update(variance_, k);
  return k;
}

double StaticKalmanFilter::update(std::span<double> estimate,
                                  std::span<const double> z, double r) {
  if (estimate.size() != z.size()) {
    throw std::invalid_argument("measurement shape mismatch");
  }
  const double k = kalman_gain(variance_, r);
  measurement_update_inplace(estimate, z, k);
  variance_ = variance_update(variance_, k);
  return k;
}

}  // namespace mlkfhe
