#include "mlkfhe/dataset.hpp"

#include <stdexcept>
#include <string>
#include <unordered_set>

namespace mlkfhe {

LabelMatrix threshold_scores(const ScoreMatrix& scores) {
  LabelMatrix out(scores.rows(), scores.cols());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    for (Eigen::Index j = 0; j < scores.cols(); ++j) {
      out(i, j) = threshold_score(scores(i, j));
    }
  }
  return out;
}

void Dataset::validate() const {
  if (features.rows() == 0) throw std::invalid_argument("dataset has no instances");
  if (labels.rows() != features.rows()) {
    throw std::invalid_argument("feature rows (" + std::to_string(features.rows()) +
                                ") and label rows (" + std::to_string(labels.rows()) +
                                ") differ");
  }
  if (labels.cols() == 0) throw std::invalid_argument("dataset has no labels");
  if (label_names.size() != num_labels()) {
    throw std::invalid_argument("label name count does not match label columns");
  }
  if (feature_info.size() != num_features()) {
    throw std::invalid_argument("feature metadata count does not match columns");
  }
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels.data()[i] > 1) {
      throw std::invalid_argument("label entries must be 0 or 1");
    }
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : label_names) {
    if (!seen.insert(name).second) {
      throw std::invalid_argument("duplicate label name '" + name + "'");
    }
  }
}

void Dataset::finalize() {
  if (label_names.empty()) {
    for (std::size_t j = 0; j < num_labels(); ++j) {
      label_names.push_back("l" + std::to_string(j));
    }
  }
  if (feature_info.empty()) {
    for (std::size_t j = 0; j < num_features(); ++j) {
      feature_info.push_back({"x" + std::to_string(j), FeatureKind::numeric, {}});
    }
  }
  validate();
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.resize(static_cast<Eigen::Index>(rows.size()), labels.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= size()) throw std::out_of_range("subset row out of range");
    const auto src = static_cast<Eigen::Index>(rows[r]);
    const auto dst = static_cast<Eigen::Index>(r);
    out.features.row(dst) = features.row(src);
    out.labels.row(dst) = labels.row(src);
  }
  out.label_names = label_names;
  out.feature_info = feature_info;
  return out;
}

Dataset make_dataset(Matrix features, LabelMatrix labels) {
  Dataset d{std::move(features), std::move(labels), {}, {}};
  d.finalize();
  return d;
}

std::vector<double> uniform_weights(std::size_t n) {
  return std::vector<double>(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
}

}  // namespace mlkfhe
