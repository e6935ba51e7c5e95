#include "mlkfhe/experiment.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "mlkfhe/dataset_io.hpp"
#include "mlkfhe/rng.hpp"
#include "mlkfhe/stratification.hpp"
#include "mlkfhe/text.hpp"

namespace mlkfhe {

namespace {

std::uint64_t name_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::size_t parse_count(const std::string& source, std::size_t line, std::string_view key,
                        std::string_view value) {
  const auto v = parse_integer(value);
  if (!v || *v < 0) {
    throw ConfigError(source + ":" + std::to_string(line) + ": '" + std::string(key) +
                      "' expects a non-negative integer, got '" + std::string(value) + "'");
  }
  return static_cast<std::size_t>(*v);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (folds < 2) throw ConfigError("folds must be >= 2");
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (datasets.empty()) throw ConfigError("no dataset configured");
  if (algorithms.empty()) throw ConfigError("no algorithm configured");
  std::set<std::string> names;
  for (const auto& d : datasets) {
    if (!names.insert(d.name).second) throw ConfigError("duplicate dataset name '" + d.name + "'");
  }
  names.clear();
  for (const auto& a : algorithms) {
    if (!names.insert(a.name).second) {
      throw ConfigError("duplicate algorithm name '" + a.name + "'");
    }
    try {
      a.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("algorithm '" + a.name + "': " + e.what());
    }
  }
  control_index();
}

std::size_t ExperimentConfig::control_index() const {
  if (control.empty()) return 0;
  for (std::size_t i = 0; i < algorithms.size(); ++i) {
    if (algorithms[i].name == control) return i;
  }
  throw ConfigError("control algorithm '" + control + "' is not configured");
}

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir,
                              const std::string& source) {
  ExperimentConfig config;
  std::string raw;
  std::size_t line = 0;
  const auto fail = [&](const std::string& message) {
    throw ConfigError(source + ":" + std::to_string(line) + ": " + message);
  };

  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = raw;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) {
      text = text.substr(0, hash);
    }
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) fail("expected 'key = value'");
    const std::string key(trim(text.substr(0, eq)));
    const std::string_view value = trim(text.substr(eq + 1));
    if (value.empty()) fail("'" + key + "' has no value");

    if (key == "seed") {
      std::uint64_t seed = 0;
      const auto res = std::from_chars(value.data(), value.data() + value.size(), seed);
      if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
        fail("'seed' expects an unsigned integer");
      }
      config.seed = seed;
    } else if (key == "folds") {
      config.folds = parse_count(source, line, key, value);
    } else if (key == "repetitions") {
      config.repetitions = parse_count(source, line, key, value);
    } else if (key == "output") {
      config.output = base_dir / std::filesystem::path(std::string(value));
    } else if (key == "control") {
      config.control = std::string(value);
    } else if (key == "dataset") {
      const auto words = split_words(value);
      DatasetEntry entry;
      entry.path = resolve_dataset_path(words[0], base_dir);
      entry.name = std::filesystem::path(words[0]).stem().string();
      for (std::size_t w = 1; w < words.size(); ++w) {
        const auto kv = words[w].find('=');
        if (kv == std::string::npos) fail("dataset option '" + words[w] + "' is not key=value");
        const std::string k = words[w].substr(0, kv);
        const std::string v = words[w].substr(kv + 1);
        if (k == "labels") {
          entry.label_count = parse_count(source, line, k, v);
        } else if (k == "name") {
          entry.name = v;
        } else {
          fail("unknown dataset option '" + k + "'");
        }
      }
      config.datasets.push_back(std::move(entry));
    } else if (key == "algorithm") {
      const auto words = split_words(value);
      if (words.size() < 2) fail("algorithm lines need '<name> <kind>'");
      AlgorithmSpec spec;
      try {
        spec = default_algorithm(parse_algorithm_kind(words[1]));
        spec.name = words[0];
        for (std::size_t w = 2; w < words.size(); ++w) {
          const auto kv = words[w].find('=');
          if (kv == std::string::npos) fail("algorithm option '" + words[w] + "' is not key=value");
          spec.set(words[w].substr(0, kv), words[w].substr(kv + 1));
        }
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
      config.algorithms.push_back(std::move(spec));
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, path.parent_path(), path.string());
}

std::filesystem::path resolve_dataset_path(const std::filesystem::path& path,
                                           const std::filesystem::path& base_dir) {
  if (path.is_absolute()) return path;
  const auto local = base_dir / path;
  if (std::filesystem::exists(local)) return local;
  if (const char* dir = std::getenv("MLKFHE_DATA_DIR"); dir && *dir) {
    const auto shared = std::filesystem::path(dir) / path;
    if (std::filesystem::exists(shared)) return shared;
  }
  return local;
}

bool ExperimentResult::all_ok() const {
  for (const auto& c : cells) {
    if (!c.ok) return false;
  }
  return true;
}

std::uint64_t fold_seed(std::uint64_t root, std::string_view dataset, std::size_t repetition) {
  return derive_seed(root, {name_hash(dataset), repetition});
}

std::uint64_t cell_seed(std::uint64_t root, std::string_view dataset, std::size_t repetition,
                        std::size_t fold, std::string_view algorithm) {
  return derive_seed(root, {name_hash(dataset), repetition, fold, name_hash(algorithm)});
}

ExperimentResult run_cv_experiment(const ExperimentConfig& config,
                                   const ExperimentOptions& options) {
  config.validate();
  std::vector<NamedDataset> datasets;
  for (const auto& entry : config.datasets) {
    LoadOptions load;
    load.label_count = entry.label_count;
    datasets.push_back({entry.name, load_dataset(entry.path, load)});
  }
  return run_cv_experiment(datasets, config, options);
}

ExperimentResult run_cv_experiment(const std::vector<NamedDataset>& datasets,
                                   const ExperimentConfig& config,
                                   const ExperimentOptions& options) {
  if (config.folds < 2) throw ConfigError("folds must be >= 2");
  if (config.repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (datasets.empty() || config.algorithms.empty()) {
    throw ConfigError("an experiment needs at least one dataset and one algorithm");
  }

  ExperimentResult result;
  for (const auto& d : datasets) result.datasets.push_back(d.name);
  for (const auto& a : config.algorithms) result.algorithms.push_back(a.name);

  // Folds per (dataset, repetition), shared by every algorithm.
  std::vector<std::vector<FoldAssignment>> folds(datasets.size());
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    for (std::size_t r = 0; r < config.repetitions; ++r) {
      auto assignment = iterative_stratification(
          datasets[d].data, config.folds, fold_seed(config.seed, datasets[d].name, r));
      assignment.repetition = r;
      folds[d].push_back(std::move(assignment));
    }
  }

  struct Task {
    std::size_t d, a, r, f;
  };
  std::vector<Task> tasks;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
      for (std::size_t r = 0; r < config.repetitions; ++r) {
        for (std::size_t f = 0; f < config.folds; ++f) tasks.push_back({d, a, r, f});
      }
    }
  }
  result.cells.resize(tasks.size());

  const auto run = [&](const Task& task) {
    const NamedDataset& named = datasets[task.d];
    const AlgorithmSpec& spec = config.algorithms[task.a];
    CellResult cell;
    cell.dataset = named.name;
    cell.algorithm = spec.name;
    cell.repetition = task.r;
    cell.fold = task.f;
    try {
      const FoldAssignment& assignment = folds[task.d][task.r];
      const Dataset train = named.data.subset(assignment.train_indices(task.f));
      const Dataset test = named.data.subset(assignment.test_indices(task.f));
      const auto seed = cell_seed(config.seed, named.name, task.r, task.f, spec.name);
      const auto start = std::chrono::steady_clock::now();
      const TrainedAlgorithm model = train_algorithm(train, spec, seed);
      cell.train_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      const LabelMatrix predicted = threshold_scores(predict_scores(model, test.features));
      const MetricReport report = evaluate(test.labels, predicted);
      cell.macro_f = report.macro_f;
      cell.hamming_loss = report.hamming_loss;
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
    }
    return cell;
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, tasks.size()));
  if (jobs == 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) result.cells[i] = run(tasks[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) {
          result.cells[i] = run(tasks[i]);
        }
      });
    }
    for (auto& worker : workers) worker.join();
  }
  return result;
}

}  // namespace mlkfhe
