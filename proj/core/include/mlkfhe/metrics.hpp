#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mlkfhe/dataset.hpp"

namespace mlkfhe {

struct LabelConfusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  /// 2TP / (2TP + FP + FN); 1 when the label is never relevant nor predicted.
  double f1() const;
};

struct MetricReport {
  double hamming_loss = 0.0;
  double macro_f = 0.0;
  std::vector<double> per_label_f;
  std::vector<LabelConfusion> confusion;
};

struct MacroF {
  double macro = 0.0;
  std::vector<double> per_label;
};

/// Fraction of mismatched cells. Throws std::invalid_argument on a shape
/// mismatch or an empty matrix.
double hamming_loss(const LabelMatrix& truth, const LabelMatrix& predicted);

/// Mismatches / q for a single instance.
double per_instance_hamming(std::span<const std::uint8_t> truth,
                            std::span<const std::uint8_t> predicted);

std::vector<LabelConfusion> label_confusion(const LabelMatrix& truth,
                                            const LabelMatrix& predicted);

MacroF macro_f(const LabelMatrix& truth, const LabelMatrix& predicted);

MetricReport evaluate(const LabelMatrix& truth, const LabelMatrix& predicted);

struct DatasetStats {
  std::size_t instances = 0;
  std::size_t inputs = 0;
  std::size_t labels = 0;
  double cardinality = 0.0;
  double mean_ir = 1.0;
  std::vector<std::size_t> label_counts;
};

/// Size, label cardinality and MeanIR. Labels without positives are left out
/// of MeanIR with a warning; if no label has positives MeanIR is 1.
DatasetStats dataset_stats(const Dataset& data);

}  // namespace mlkfhe
