#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Core>

namespace mlkfhe {

/// Row-major so that each instance is a contiguous span.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// n x q binary label matrix, entries in {0, 1}.
using LabelMatrix =
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// n x q per-label scores in [0, 1]; the proxy representation of a hypothesis.
using ScoreMatrix = Matrix;

inline std::span<const double> row_span(const Matrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

inline std::span<const std::uint8_t> row_span(const LabelMatrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

/// Relevance decision for a score: ties at exactly 0.5 are relevant.
inline constexpr double kDecisionThreshold = 0.5;

inline std::uint8_t threshold_score(double s) {
  return s >= kDecisionThreshold ? 1 : 0;
}

LabelMatrix threshold_scores(const ScoreMatrix& scores);

}  // namespace mlkfhe
