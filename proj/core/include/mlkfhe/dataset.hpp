#pragma once

#include <span>
#include <string>
#include <vector>

#include "mlkfhe/types.hpp"

namespace mlkfhe {

enum class FeatureKind { numeric, categorical };

/// Where an encoded feature column came from. Nominal attributes expand to
/// one indicator column per category.
struct FeatureInfo {
  std::string source;
  FeatureKind kind = FeatureKind::numeric;
  std::string category;  // empty for numeric columns

  bool operator==(const FeatureInfo&) const = default;
};

/// n x d features with an n x q binary label matrix.
struct Dataset {
  Matrix features;
  LabelMatrix labels;
  std::vector<std::string> label_names;
  std::vector<FeatureInfo> feature_info;

  std::size_t size() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t num_features() const { return static_cast<std::size_t>(features.cols()); }
  std::size_t num_labels() const { return static_cast<std::size_t>(labels.cols()); }

  std::span<const double> row(std::size_t i) const {
    return row_span(features, static_cast<Eigen::Index>(i));
  }
  std::span<const std::uint8_t> label_row(std::size_t i) const {
    return row_span(labels, static_cast<Eigen::Index>(i));
  }

  /// Throws std::invalid_argument when shapes disagree, a label entry is not
  /// 0/1, n == 0, q == 0, or label names repeat.
  void validate() const;

  /// Fills in default label names and numeric feature info when they are
  /// empty, then validates.
  void finalize();

  Dataset subset(std::span<const std::size_t> rows) const;
};

/// Builds a dataset from dense matrices, naming labels "l0".."l{q-1}" and
/// features "x0".."x{d-1}".
Dataset make_dataset(Matrix features, LabelMatrix labels);

/// Uniform weights 1/n.
std::vector<double> uniform_weights(std::size_t n);

}  // namespace mlkfhe
