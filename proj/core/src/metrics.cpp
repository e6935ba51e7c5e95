#include "mlkfhe/metrics.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "mlkfhe/logging.hpp"

namespace mlkfhe {

namespace {

void require_same_shape(const LabelMatrix& truth, const LabelMatrix& predicted) {
  if (truth.rows() != predicted.rows() || truth.cols() != predicted.cols()) {
    throw std::invalid_argument(
        "label matrices differ in shape: " + std::to_string(truth.rows()) + "x" +
        std::to_string(truth.cols()) + " vs " + std::to_string(predicted.rows()) + "x" +
        std::to_string(predicted.cols()));
  }
  if (truth.size() == 0) throw std::invalid_argument("label matrices are empty");
}

}  // namespace

double LabelConfusion::f1() const {
  const std::size_t denom = 2 * tp + fp + fn;
  if (denom == 0) return 1.0;
  return static_cast<double>(2 * tp) / static_cast<double>(denom);
}

double hamming_loss(const LabelMatrix& truth, const LabelMatrix& predicted) {
  require_same_shape(truth, predicted);
  std::size_t mismatches = 0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    mismatches += truth.data()[i] != predicted.data()[i];
  }
  return static_cast<double>(mismatches) / static_cast<double>(truth.size());
}

double per_instance_hamming(std::span<const std::uint8_t> truth,
                            std::span<const std::uint8_t> predicted) {
  if (truth.size() != predicted.size()) {
    throw std::invalid_argument("label rows differ in length");
  }
  if (truth.empty()) throw std::invalid_argument("label rows are empty");
  std::size_t mismatches = 0;
  for (std::size_t j = 0; j < truth.size(); ++j) mismatches += truth[j] != predicted[j];
  return static_cast<double>(mismatches) / static_cast<double>(truth.size());
}

std::vector<LabelConfusion> label_confusion(const LabelMatrix& truth,
                                            const LabelMatrix& predicted) {
  require_same_shape(truth, predicted);
  std::vector<LabelConfusion> out(static_cast<std::size_t>(truth.cols()));
  for (Eigen::Index i = 0; i < truth.rows(); ++i) {
    for (Eigen::Index j = 0; j < truth.cols(); ++j) {
      auto& c = out[static_cast<std::size_t>(j)];
      const bool t = truth(i, j) != 0;
      const bool p = predicted(i, j) != 0;
      if (t && p) ++c.tp;
      else if (!t && p) ++c.fp;
      else if (t && !p) ++c.fn;
      else ++c.tn;
    }
  }
  return out;
}

MacroF macro_f(const LabelMatrix& truth, const LabelMatrix& predicted) {
  MacroF out;
  double total = 0.0;
  for (const auto& c : label_confusion(truth, predicted)) {
    out.per_label.push_back(c.f1());
    total += out.per_label.back();
  }
  out.macro = total / static_cast<double>(out.per_label.size());
  return out;
}

MetricReport evaluate(const LabelMatrix& truth, const LabelMatrix& predicted) {
  MetricReport report;
  report.confusion = label_confusion(truth, predicted);
  std::size_t errors = 0;
  double total = 0.0;
  for (const auto& c : report.confusion) {
    errors += c.fp + c.fn;
    report.per_label_f.push_back(c.f1());
    total += report.per_label_f.back();
  }
  report.hamming_loss = static_cast<double>(errors) / static_cast<double>(truth.size());
  report.macro_f = total / static_cast<double>(report.per_label_f.size());
  return report;
}

DatasetStats dataset_stats(const Dataset& data) {
  data.validate();
  DatasetStats stats;
  stats.instances = data.size();
  stats.inputs = data.num_features();
  stats.labels = data.num_labels();
  stats.label_counts.assign(stats.labels, 0);
  std::size_t total = 0;
  for (Eigen::Index i = 0; i < data.labels.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.labels.cols(); ++j) {
      if (data.labels(i, j) != 0) {
        ++stats.label_counts[static_cast<std::size_t>(j)];
        ++total;
      }
    }
  }
  stats.cardinality = static_cast<double>(total) / static_cast<double>(stats.instances);

  const std::size_t most = *std::max_element(stats.label_counts.begin(), stats.label_counts.end());
  double ir_sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t j = 0; j < stats.labels; ++j) {
    const std::size_t count = stats.label_counts[j];
    if (count == 0) {
      warn("label '" + data.label_names[j] + "' has no positive instances; excluded from MeanIR");
      continue;
    }
    ir_sum += static_cast<double>(most) / static_cast<double>(count);
    ++counted;
  }
  stats.mean_ir = counted > 0 ? ir_sum / static_cast<double>(counted) : 1.0;
  return stats;
}

}  // namespace mlkfhe
