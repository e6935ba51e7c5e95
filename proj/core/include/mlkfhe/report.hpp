#pragma once

// Result tables for cross-validation experiments: per-cell results, per
// dataset ranks, significance tests, critical-difference plot data and a
// plain-text summary table.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mlkfhe/experiment.hpp"
#include "mlkfhe/stats.hpp"

namespace mlkfhe {

/// Written as leading "# " lines of every output file.
struct ReportMetadata {
  std::string version;
  std::uint64_t seed = 0;
  std::string invocation;

  std::vector<std::string> lines() const;
};

std::string tool_version();

struct WilcoxonCell {
  std::string dataset;
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t pairs = 0;  // folds where both cells succeeded
  std::optional<WilcoxonResult> test;
};

/// Aggregates over repetitions and folds, per dataset and algorithm. Rank 1
/// is the highest mean macro-F. Datasets with a failed algorithm everywhere
/// are left out of the Friedman analysis.
struct ExperimentSummary {
  std::vector<std::string> datasets;
  std::vector<std::string> algorithms;
  Matrix mean_macro_f;  // datasets x algorithms; NaN when no cell succeeded
  Matrix sd_macro_f;
  Matrix mean_hamming;
  Matrix ranks;
  std::vector<double> average_ranks;
  std::size_t control = 0;
  std::optional<FriedmanResult> friedman;
  std::vector<PairwiseComparison> pairwise;
  std::vector<WilcoxonCell> wilcoxon;
};

ExperimentSummary summarize(const ExperimentResult& result, std::size_t control);

/// Columns: dataset, algorithm, repetition, fold, macro_f, hamming_loss,
/// train_seconds. Failed cells and, unless `timing`, the training time are
/// written as NA so that repeated runs produce identical files.
void write_results_csv(std::ostream& out, const ExperimentResult& result,
                       const ReportMetadata& meta, bool timing);

/// Reads a results file written by write_results_csv; NA metrics mark
/// failed cells. Dataset and algorithm order follow first appearance.
ExperimentResult read_results_csv(std::istream& in, const std::string& source = "<results>");

/// Columns: dataset, algorithm, mean_macro_f, sd_macro_f, mean_hamming_loss,
/// rank; followed by one "Avg. rank" row per algorithm.
void write_ranks_csv(std::ostream& out, const ExperimentSummary& summary,
                     const ReportMetadata& meta);

/// Columns: test, dataset, algorithm_a, algorithm_b, statistic, p_value,
/// adjusted_p. One Wilcoxon row per dataset and algorithm pair, then the
/// Friedman row and the Finner-adjusted versus-control and pairwise rows.
void write_stats_csv(std::ostream& out, const ExperimentSummary& summary,
                     const ReportMetadata& meta);

/// Columns: kind, algorithm_a, algorithm_b, avg_rank_a, avg_rank_b,
/// adjusted_p, significant. "rank" rows list each algorithm; "pair" rows
/// list every pairwise comparison with significance at alpha.
void write_cd_plot_csv(std::ostream& out, const ExperimentSummary& summary,
                       const ReportMetadata& meta, double alpha = 0.05);

/// Datasets as rows and algorithms as columns, cells "mean ± sd (rank)",
/// closed by an "Avg. rank" row.
std::string summary_table(const ExperimentSummary& summary);

struct ReportFiles {
  std::filesystem::path results, ranks, stats, cd_plot, summary;
};

/// Writes results.csv, ranks.csv, stats.csv, cd_plot.csv and summary.txt
/// into `dir`, creating it if needed.
ReportFiles write_report(const std::filesystem::path& dir, const ExperimentResult& result,
                         std::size_t control, const ReportMetadata& meta, bool timing);

}  // namespace mlkfhe
