// mlkfhe: train, apply and benchmark multi-label ensembles from the shell.
//
// Exit status: 0 on success, 1 when training or a benchmark cell fails,
// 2 for invalid flags, configs or input files.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mlkfhe/algorithm.hpp"
#include "mlkfhe/dataset_io.hpp"
#include "mlkfhe/experiment.hpp"
#include "mlkfhe/metrics.hpp"
#include "mlkfhe/report.hpp"
#include "mlkfhe/serialization.hpp"
#include "mlkfhe/text.hpp"

namespace fs = std::filesystem;
using namespace mlkfhe;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Thrown for anything the user can fix by changing flags or inputs.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string invocation_string(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) out += ' ';
    std::string arg = i == 0 ? fs::path(argv[0]).filename().string() : argv[i];
    if (arg.find_first_of(" \t'\"") != std::string::npos) {
      std::string quoted = "'";
      for (char c : arg) quoted += c == '\'' ? std::string("'\\''") : std::string(1, c);
      arg = quoted + "'";
    }
    out += arg;
  }
  return out;
}

Dataset read_dataset(const std::string& path, std::optional<std::size_t> labels) {
  LoadOptions options;
  options.label_count = labels;
  try {
    return load_dataset(resolve_dataset_path(path, fs::current_path()), options);
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  return out;
}

void write_header(std::ostream& out, const ReportMetadata& meta) {
  for (const auto& line : meta.lines()) out << "# " << line << '\n';
}

TrainedAlgorithm read_model(const std::string& path) {
  try {
    return load_model(fs::path(path));
  } catch (const SerializationError& e) {
    throw UsageError(e.what());
  }
}

// --- train ----------------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::optional<std::size_t> labels;
  std::string family = "kfhe-homer";
  long long components = 10;
  std::uint64_t seed = 0;
  std::string kernel;
  std::string weighting;
  std::optional<double> fraction;
  std::vector<std::string> params;
  std::string output = "model.txt";
  std::string log;
};

int cmd_train(const TrainArgs& args, const ReportMetadata& meta) {
  AlgorithmSpec spec;
  try {
    spec = default_algorithm(parse_algorithm_kind(args.family));
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--family: ") + e.what());
  }
  if (args.components < 1) throw UsageError("--components must be >= 1");
  spec.components = static_cast<std::size_t>(args.components);
  try {
    if (!args.kernel.empty()) spec.set("kernel", args.kernel);
    if (!args.weighting.empty()) spec.set("weighting", args.weighting);
    if (args.fraction) spec.set("fraction", format_double(*args.fraction));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  for (const auto& p : args.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw UsageError("--param expects key=value, got '" + p + "'");
    try {
      spec.set(p.substr(0, eq), p.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--param: ") + e.what());
    }
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const Dataset data = read_dataset(args.data, args.labels);
  TrainedAlgorithm model;
  try {
    model = train_algorithm(data, spec, args.seed);
  } catch (const std::exception& e) {
    std::cerr << "error: training failed: " << e.what() << '\n';
    return kExitFailure;
  }

  const fs::path model_path = args.output;
  {
    auto out = open_output(model_path);
    save_model(model, out, meta.lines());
  }
  const fs::path log_path = args.log.empty() ? fs::path(model_path.string() + ".log.csv")
                                             : fs::path(args.log);
  {
    auto out = open_output(log_path);
    write_header(out, meta);
    out << "t,r,k,p,k_w,p_w\n";
    for (const auto& it : model.log) {
      out << join_csv({std::to_string(it.t), format_double(it.model_noise),
                       format_double(it.model_gain), format_double(it.model_variance),
                       format_double(it.weight_gain), format_double(it.weight_variance)})
          << '\n';
    }
  }
  std::cout << "wrote " << model_path.string() << " and " << log_path.string() << '\n';
  return 0;
}

// --- predict / evaluate -----------------------------------------------------------

struct ApplyArgs {
  std::string model;
  std::string data;
  std::optional<std::size_t> labels;
  std::string output;
  bool decisions = false;
};

void check_compatible(const TrainedAlgorithm& model, const Dataset& data) {
  if (data.num_features() != model.input_dim) {
    throw UsageError("model expects " + std::to_string(model.input_dim) + " features, data has " +
                     std::to_string(data.num_features()));
  }
  if (data.num_labels() != model.label_names.size()) {
    throw UsageError("model predicts " + std::to_string(model.label_names.size()) +
                     " labels, data has " + std::to_string(data.num_labels()));
  }
}

int cmd_predict(const ApplyArgs& args, const ReportMetadata& meta) {
  const TrainedAlgorithm model = read_model(args.model);
  const Dataset data = read_dataset(args.data, args.labels);
  check_compatible(model, data);
  const ScoreMatrix scores = predict_scores(model, data.features);

  std::ofstream file;
  if (!args.output.empty()) file = open_output(args.output);
  std::ostream& out = args.output.empty() ? std::cout : file;
  write_header(out, meta);
  out << join_csv(model.label_names) << '\n';
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    std::string line;
    for (Eigen::Index j = 0; j < scores.cols(); ++j) {
      if (j) line += ',';
      line += args.decisions ? std::string(threshold_score(scores(i, j)) ? "1" : "0")
                             : format_double(scores(i, j));
    }
    out << line << '\n';
  }
  return 0;
}

int cmd_evaluate(const ApplyArgs& args, const ReportMetadata& meta) {
  const TrainedAlgorithm model = read_model(args.model);
  const Dataset data = read_dataset(args.data, args.labels);
  check_compatible(model, data);
  const MetricReport report =
      evaluate(data.labels, threshold_scores(predict_scores(model, data.features)));

  std::cout << "hamming_loss " << format_fixed(report.hamming_loss, 4) << '\n'
            << "macro_f      " << format_fixed(report.macro_f, 4) << '\n';
  for (std::size_t j = 0; j < report.per_label_f.size(); ++j) {
    std::cout << "  " << model.label_names[j] << "  F=" << format_fixed(report.per_label_f[j], 4)
              << '\n';
  }
  if (!args.output.empty()) {
    auto out = open_output(args.output);
    write_header(out, meta);
    out << "label,tp,fp,fn,tn,f1\n";
    for (std::size_t j = 0; j < report.confusion.size(); ++j) {
      const auto& c = report.confusion[j];
      out << join_csv({model.label_names[j], std::to_string(c.tp), std::to_string(c.fp),
                       std::to_string(c.fn), std::to_string(c.tn), format_double(c.f1())})
          << '\n';
    }
    out << join_csv({"macro", "NA", "NA", "NA", "NA", format_double(report.macro_f)}) << '\n';
    out << join_csv({"hamming_loss", "NA", "NA", "NA", "NA", format_double(report.hamming_loss)})
        << '\n';
  }
  return 0;
}

// --- benchmark / stats ------------------------------------------------------------

struct BenchmarkArgs {
  std::string config;
  std::string output;
  std::size_t jobs = 1;
  bool timing = false;
};

int cmd_benchmark(const BenchmarkArgs& args, ReportMetadata meta) {
  ExperimentConfig config;
  try {
    config = load_config(args.config);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  if (!args.output.empty()) config.output = args.output;
  meta.seed = config.seed;

  ExperimentResult result;
  try {
    result = run_cv_experiment(config, {args.jobs});
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  const ReportFiles files =
      write_report(config.output, result, config.control_index(), meta, args.timing);

  std::ifstream summary(files.summary);
  for (std::string line; std::getline(summary, line);) {
    if (!line.starts_with('#')) std::cout << line << '\n';
  }
  std::size_t failed = 0;
  for (const auto& c : result.cells) {
    if (c.ok) continue;
    ++failed;
    std::cerr << "error: " << c.dataset << " / " << c.algorithm << " rep " << c.repetition
              << " fold " << c.fold << ": " << c.error << '\n';
  }
  std::cout << "wrote " << files.results.string() << ", " << files.ranks.string() << ", "
            << files.stats.string() << '\n';
  if (failed > 0) {
    std::cerr << failed << " of " << result.cells.size() << " cells failed\n";
    return kExitFailure;
  }
  return 0;
}

struct StatsArgs {
  std::string results;
  std::string control;
  std::string output = ".";
};

int cmd_stats(const StatsArgs& args, const ReportMetadata& meta) {
  std::ifstream in(args.results);
  if (!in) throw UsageError("cannot open " + args.results);
  ExperimentResult result;
  try {
    result = read_results_csv(in, args.results);
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  std::size_t control = 0;
  if (!args.control.empty()) {
    const auto it = std::find(result.algorithms.begin(), result.algorithms.end(), args.control);
    if (it == result.algorithms.end()) {
      throw UsageError("--control: unknown algorithm '" + args.control + "'");
    }
    control = static_cast<std::size_t>(it - result.algorithms.begin());
  }
  const ExperimentSummary summary = summarize(result, control);
  const fs::path dir = args.output;
  fs::create_directories(dir);
  {
    auto out = open_output(dir / "ranks.csv");
    write_ranks_csv(out, summary, meta);
  }
  {
    auto out = open_output(dir / "stats.csv");
    write_stats_csv(out, summary, meta);
  }
  {
    auto out = open_output(dir / "cd_plot.csv");
    write_cd_plot_csv(out, summary, meta);
  }
  std::cout << summary_table(summary);
  return result.all_ok() ? 0 : kExitFailure;
}

// --- dataset-info -----------------------------------------------------------------

struct InfoArgs {
  std::string data;
  std::optional<std::size_t> labels;
  std::string output;
};

int cmd_dataset_info(const InfoArgs& args, const ReportMetadata& meta) {
  const Dataset data = read_dataset(args.data, args.labels);
  const DatasetStats stats = dataset_stats(data);
  std::cout << "instances    " << stats.instances << '\n'
            << "inputs       " << stats.inputs << '\n'
            << "labels       " << stats.labels << '\n'
            << "cardinality  " << format_fixed(stats.cardinality, 3) << '\n'
            << "MeanIR       " << format_fixed(stats.mean_ir, 3) << '\n';
  if (!args.output.empty()) {
    auto out = open_output(args.output);
    write_header(out, meta);
    out << "dataset,instances,inputs,labels,cardinality,mean_ir\n";
    out << join_csv({fs::path(args.data).stem().string(), std::to_string(stats.instances),
                     std::to_string(stats.inputs), std::to_string(stats.labels),
                     format_double(stats.cardinality), format_double(stats.mean_ir)})
        << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-label Kalman-filter-based heuristic ensembles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());

  ReportMetadata meta;
  meta.version = tool_version();
  meta.invocation = invocation_string(argc, argv);

  const auto add_labels = [](CLI::App* cmd, std::optional<std::size_t>& labels) {
    cmd->add_option("--labels", labels,
                    "Number of label columns (the last q); otherwise ARFF '-C q' or CSV "
                    "'label:' headers identify them");
  };

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write it with its iteration log");
  train_cmd->add_option("data", train.data, "Training dataset (.arff or .csv)")->required();
  add_labels(train_cmd, train.labels);
  train_cmd->add_option("--family", train.family,
                        "kfhe-homer, kfhe-cc, ehomer, ecc, homer, cc, br or constant")
      ->capture_default_str();
  train_cmd->add_option("--components,-T", train.components, "Ensemble components T")
      ->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "Random seed")->capture_default_str();
  train_cmd->add_option("--kernel", train.kernel, "Base learner kernel (linear, radial)");
  train_cmd->add_option("--weighting", train.weighting, "ML-KFHE weighting (resample, direct)");
  train_cmd->add_option("--fraction", train.fraction, "Resample size as a multiple of n");
  train_cmd->add_option("--param", train.params, "Extra hyperparameter key=value (repeatable)");
  train_cmd->add_option("--output,-o", train.output, "Model file")->capture_default_str();
  train_cmd->add_option("--log", train.log, "Iteration log CSV (default <model>.log.csv)");

  ApplyArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Write per-label scores for a dataset");
  predict_cmd->add_option("--model,-m", predict.model, "Model file")->required();
  predict_cmd->add_option("data", predict.data, "Dataset to score")->required();
  add_labels(predict_cmd, predict.labels);
  predict_cmd->add_option("--output,-o", predict.output, "Output CSV (default stdout)");
  predict_cmd->add_flag("--decisions", predict.decisions, "Write 0/1 decisions instead of scores");

  ApplyArgs evaluate_args;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a model on a labelled dataset");
  evaluate_cmd->add_option("--model,-m", evaluate_args.model, "Model file")->required();
  evaluate_cmd->add_option("data", evaluate_args.data, "Labelled dataset")->required();
  add_labels(evaluate_cmd, evaluate_args.labels);
  evaluate_cmd->add_option("--output,-o", evaluate_args.output, "Per-label metrics CSV");

  BenchmarkArgs bench;
  auto* bench_cmd = app.add_subcommand("benchmark", "Run a cross-validation benchmark config");
  bench_cmd->add_option("config", bench.config, "Benchmark config file")->required();
  bench_cmd->add_option("--output,-o", bench.output, "Output directory (overrides the config)");
  bench_cmd->add_option("--jobs,-j", bench.jobs, "Worker threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--timing", bench.timing, "Record training times (output is then not reproducible)");

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Recompute ranks and tests from results.csv");
  stats_cmd->add_option("results", stats.results, "results.csv from a benchmark")->required();
  stats_cmd->add_option("--control", stats.control, "Control algorithm (default: first)");
  stats_cmd->add_option("--output,-o", stats.output, "Output directory")->capture_default_str();

  InfoArgs info;
  auto* info_cmd = app.add_subcommand("dataset-info", "Print dataset size, cardinality and MeanIR");
  info_cmd->add_option("data", info.data, "Dataset file")->required();
  add_labels(info_cmd, info.labels);
  info_cmd->add_option("--output,-o", info.output, "Also write the statistics as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*train_cmd) {
      meta.seed = train.seed;
      return cmd_train(train, meta);
    }
    if (*predict_cmd) return cmd_predict(predict, meta);
    if (*evaluate_cmd) return cmd_evaluate(evaluate_args, meta);
    if (*bench_cmd) return cmd_benchmark(bench, meta);
    if (*stats_cmd) return cmd_stats(stats, meta);
    if (*info_cmd) return cmd_dataset_info(info, meta);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
