#pragma once

// Repeated, stratified k-fold cross-validation over datasets x algorithms.
//
// Config files are flat "key = value" lines; '#' starts a comment.
//
//   seed = 42
//   folds = 5
//   repetitions = 2
//   output = results          (directory, relative to the config file)
//   control = kfhe-homer      (algorithm name for the versus-control tests)
//   dataset = flags.arff labels=7 name=flags
//   algorithm = kfhe-homer kfhe-homer components=25
//   algorithm = ecc-linear ecc components=25 kernel=linear
//
// "dataset" and "algorithm" repeat. An algorithm line is "<name> <kind>"
// followed by key=value hyperparameters (see AlgorithmSpec::set). Relative
// dataset paths resolve against the config file's directory, then against
// $MLKFHE_DATA_DIR.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlkfhe/algorithm.hpp"
#include "mlkfhe/dataset.hpp"
#include "mlkfhe/metrics.hpp"

namespace mlkfhe {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetEntry {
  std::string name;
  std::filesystem::path path;
  std::optional<std::size_t> label_count;
};

struct ExperimentConfig {
  std::vector<DatasetEntry> datasets;
  std::vector<AlgorithmSpec> algorithms;
  std::size_t folds = 5;
  std::size_t repetitions = 2;
  std::uint64_t seed = 0;
  std::filesystem::path output = "results";
  std::string control;  // empty selects the first algorithm

  /// Throws ConfigError: F >= 2, R >= 1, at least one dataset and
  /// algorithm, unique names, valid hyperparameters, known control.
  void validate() const;
  std::size_t control_index() const;
};

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir,
                              const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// `path` if absolute or present under `base_dir`, else under
/// $MLKFHE_DATA_DIR when that is set and the file exists there.
std::filesystem::path resolve_dataset_path(const std::filesystem::path& path,
                                           const std::filesystem::path& base_dir);

struct CellResult {
  std::string dataset;
  std::string algorithm;
  std::size_t repetition = 0;
  std::size_t fold = 0;
  bool ok = false;
  double macro_f = 0.0;
  double hamming_loss = 0.0;
  double train_seconds = 0.0;
  std::string error;
};

struct ExperimentOptions {
  std::size_t jobs = 1;
};

struct NamedDataset {
  std::string name;
  Dataset data;
};

/// Cells ordered by (dataset, algorithm) in config order, then repetition
/// and fold.
struct ExperimentResult {
  std::vector<std::string> datasets;
  std::vector<std::string> algorithms;
  std::vector<CellResult> cells;

  bool all_ok() const;
};

/// Loads every dataset (throwing on parse errors) and runs the experiment.
ExperimentResult run_cv_experiment(const ExperimentConfig& config,
                                   const ExperimentOptions& options = {});

/// Runs on already-loaded datasets; `config.datasets` is ignored. Each
/// repetition draws fresh stratified folds shared by all algorithms. A cell
/// whose training or evaluation throws is recorded as failed.
ExperimentResult run_cv_experiment(const std::vector<NamedDataset>& datasets,
                                   const ExperimentConfig& config,
                                   const ExperimentOptions& options = {});

/// Seed derived from the experiment seed and the cell's names and indices.
std::uint64_t cell_seed(std::uint64_t root, std::string_view dataset, std::size_t repetition,
                        std::size_t fold, std::string_view algorithm);
std::uint64_t fold_seed(std::uint64_t root, std::string_view dataset, std::size_t repetition);

}  // namespace mlkfhe
