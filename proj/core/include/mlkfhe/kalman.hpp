#pragma once

// Measurement-update-only (static state) Kalman filter arithmetic.
//
// The estimated state is a score matrix, a score vector or a weight vector;
// its uncertainty is a single scalar variance shared by every entry. There is
// no time update: the state is assumed static and each measurement is fused
// into the running estimate as soon as it arrives.

#include <span>
#include <vector>

#include "mlkfhe/types.hpp"

namespace mlkfhe {

/// Gains below this total variance are treated as "already certain".
inline constexpr double kDegenerateVariance = 1e-12;

/// k = p / (p + r). Returns 0 when p + r < kDegenerateVariance.
/// Throws std::invalid_argument for negative (or NaN) p or r.
double kalman_gain(double p, double r);

/// (1 - k) p. Throws std::invalid_argument if p < 0 or k is outside [0, 1].
double variance_update(double p, double k);

/// prev + k (z - prev), elementwise.
std::vector<double> measurement_update(std::span<const double> prev,
                                       std::span<const double> z, double k);

/// Matrix form used for score matrices. Shapes must agree.
Matrix measurement_update(const Matrix& prev, const Matrix& z, double k);

/// In-place variant: prev <- prev + k (z - prev).
void measurement_update_inplace(std::span<double> prev,
                                std::span<const double> z, double k);

/// Scalar-variance static Kalman filter. Holds only the variance; the state
/// itself is owned by the caller so the same filter drives both score
/// matrices and weight vectors.
class StaticKalmanFilter {
 public:
  explicit StaticKalmanFilter(double initial_variance = 1.0);

  double variance() const noexcept { return variance_; }

  /// Computes the gain for a measurement with noise r, folds z into
  /// `estimate` and shrinks the variance. Returns the gain that was applied.
  double update(std::span<double> estimate, std::span<const double> z,
                double r);

  /// Gain/variance bookkeeping only, for callers fusing the state themselves.
  double update_variance(double r);

 private:
  double variance_;
};

}  // namespace mlkfhe
