#include "mlkfhe/algorithm.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

#include "mlkfhe/text.hpp"

namespace mlkfhe {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double real_value(std::string_view key, std::string_view value) {
  const auto v = parse_double(value);
  if (!v) {
    throw std::invalid_argument("'" + std::string(key) + "' expects a number, got '" +
                                std::string(value) + "'");
  }
  return *v;
}

std::size_t count_value(std::string_view key, std::string_view value) {
  const auto v = parse_integer(value);
  if (!v || *v < 0) {
    throw std::invalid_argument("'" + std::string(key) + "' expects a non-negative integer, got '" +
                                std::string(value) + "'");
  }
  return static_cast<std::size_t>(*v);
}

}  // namespace

std::string_view to_string(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::kfhe_homer: return "kfhe-homer";
    case AlgorithmKind::kfhe_cc: return "kfhe-cc";
    case AlgorithmKind::ehomer: return "ehomer";
    case AlgorithmKind::ecc: return "ecc";
    case AlgorithmKind::homer: return "homer";
    case AlgorithmKind::cc: return "cc";
    case AlgorithmKind::br: return "br";
    case AlgorithmKind::constant: return "constant";
  }
  return "?";
}

AlgorithmKind parse_algorithm_kind(std::string_view text) {
  for (auto kind : {AlgorithmKind::kfhe_homer, AlgorithmKind::kfhe_cc, AlgorithmKind::ehomer,
                    AlgorithmKind::ecc, AlgorithmKind::homer, AlgorithmKind::cc,
                    AlgorithmKind::br, AlgorithmKind::constant}) {
    if (text == to_string(kind)) return kind;
  }
  if (text == "e-homer") return AlgorithmKind::ehomer;
  if (text == "bagged-cc") return AlgorithmKind::ecc;
  throw std::invalid_argument("unknown algorithm '" + std::string(text) + "'");
}

bool AlgorithmSpec::is_ensemble() const {
  return kind == AlgorithmKind::kfhe_homer || kind == AlgorithmKind::kfhe_cc ||
         kind == AlgorithmKind::ehomer || kind == AlgorithmKind::ecc;
}

void AlgorithmSpec::set(std::string_view key, std::string_view value) {
  if (key == "components" || key == "T") {
    components = count_value(key, value);
  } else if (key == "weighting") {
    weighting = parse_weighting(value);
  } else if (key == "fraction") {
    sample_fraction = real_value(key, value);
  } else if (key == "kernel") {
    base.kernel = parse_kernel(value);
  } else if (key == "lambda") {
    base.lambda = real_value(key, value);
  } else if (key == "rff_dim") {
    base.rff_dim = count_value(key, value);
  } else if (key == "gamma") {
    base.rff_gamma = real_value(key, value);
  } else if (key == "epochs") {
    base.max_epochs = count_value(key, value);
  } else if (key == "decay") {
    base.step_decay = real_value(key, value);
  } else if (key == "tol") {
    base.tolerance = real_value(key, value);
  } else if (key == "clustering") {
    clustering = parse_clustering(value);
  } else if (key == "k") {
    k = count_value(key, value);
  } else {
    throw std::invalid_argument("unknown algorithm parameter '" + std::string(key) + "'");
  }
}

void AlgorithmSpec::validate() const {
  if (is_ensemble() && components < 1) {
    throw std::invalid_argument("components must be >= 1");
  }
  if (is_ensemble() && !(sample_fraction > 0.0)) {
    throw std::invalid_argument("fraction must be > 0");
  }
  if (kind == AlgorithmKind::homer && k < 2) throw std::invalid_argument("k must be >= 2");
  base.validate();
}

AlgorithmSpec default_algorithm(AlgorithmKind kind) {
  AlgorithmSpec spec;
  spec.kind = kind;
  spec.name = std::string(to_string(kind));
  return spec;
}

TrainedAlgorithm train_algorithm(const Dataset& data, const AlgorithmSpec& spec,
                                 std::uint64_t seed) {
  spec.validate();
  data.validate();
  TrainedAlgorithm out;
  out.spec = spec;
  out.seed = seed;
  out.label_names = data.label_names;
  out.input_dim = data.num_features();

  BinaryLearnerSpec base = spec.base;
  base.seed = seed;
  const auto uniform = uniform_weights(data.size());

  switch (spec.kind) {
    case AlgorithmKind::kfhe_homer:
    case AlgorithmKind::kfhe_cc: {
      KfheOptions options;
      options.components = spec.components;
      options.family = spec.kind == AlgorithmKind::kfhe_homer ? Family::homer : Family::cc;
      options.seed = seed;
      options.weighting = spec.weighting;
      options.sample_fraction = spec.sample_fraction;
      options.base = base;
      auto result = train_ml_kfhe(data, options);
      out.log = std::move(result.iterations);
      out.model = std::move(result.model);
      break;
    }
    case AlgorithmKind::ehomer:
    case AlgorithmKind::ecc: {
      BaggingOptions options;
      options.components = spec.components;
      options.family = spec.kind == AlgorithmKind::ehomer ? Family::homer : Family::cc;
      options.seed = seed;
      options.sample_fraction = spec.sample_fraction;
      options.base = base;
      out.model = train_bagged(data, options);
      break;
    }
    case AlgorithmKind::homer:
      out.model = Component{train_homer(data, uniform, {spec.clustering, spec.k}, base)};
      break;
    case AlgorithmKind::cc: {
      std::vector<std::size_t> order(data.num_labels());
      std::iota(order.begin(), order.end(), std::size_t{0});
      out.model = Component{train_cc(data, uniform, order, base)};
      break;
    }
    case AlgorithmKind::br:
      out.model = Component{train_br(data, uniform, base)};
      break;
    case AlgorithmKind::constant:
      out.model = Component{train_constant(data, uniform)};
      break;
  }
  return out;
}

std::size_t model_input_dim(const TrainedModel& model) {
  return std::visit(overloaded{[](const KfheModel& m) { return m.input_dim; },
                               [](const BaggedModel& m) { return m.input_dim; },
                               [](const Component& c) { return component_input_dim(c); }},
                    model);
}

std::size_t model_num_labels(const TrainedModel& model) {
  return std::visit(overloaded{[](const KfheModel& m) { return m.num_labels; },
                               [](const BaggedModel& m) { return m.num_labels; },
                               [](const Component& c) { return component_num_labels(c); }},
                    model);
}

ScoreMatrix predict_scores(const TrainedModel& model, const Matrix& features) {
  const std::size_t d = model_input_dim(model);
  if (static_cast<std::size_t>(features.cols()) != d) {
    throw std::invalid_argument("model expects " + std::to_string(d) + " features, got " +
                                std::to_string(features.cols()));
  }
  return std::visit(
      overloaded{[&](const KfheModel& m) { return predict_ml_kfhe(m, features); },
                 [&](const BaggedModel& m) { return predict_bagged(m, features); },
                 [&](const Component& c) { return predict_component(c, features); }},
      model);
}

ScoreMatrix predict_scores(const TrainedAlgorithm& trained, const Matrix& features) {
  return predict_scores(trained.model, features);
}

}  // namespace mlkfhe
