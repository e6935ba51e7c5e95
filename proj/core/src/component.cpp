#include "mlkfhe/component.hpp"

#include <stdexcept>
#include <string>

namespace mlkfhe {

std::string_view to_string(Family family) {
  return family == Family::homer ? "homer" : "cc";
}

Family parse_family(std::string_view text) {
  if (text == "homer") return Family::homer;
  if (text == "cc") return Family::cc;
  throw std::invalid_argument("unknown component family '" + std::string(text) + "'");
}

Vector predict_component(const Component& component, std::span<const double> x) {
  return std::visit([&](const auto& model) { return model.predict(x); }, component);
}

ScoreMatrix predict_component(const Component& component, const Matrix& features) {
  const auto q = static_cast<Eigen::Index>(component_num_labels(component));
  ScoreMatrix scores(features.rows(), q);
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    scores.row(i) = predict_component(component, row_span(features, i)).transpose();
  }
  return scores;
}

std::size_t component_input_dim(const Component& component) {
  return std::visit([](const auto& model) { return model.input_dim; }, component);
}

std::size_t component_num_labels(const Component& component) {
  return std::visit(
      [](const auto& model) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(model)>, HomerTree>) {
          return model.num_labels;
        } else {
          return model.num_labels();
        }
      },
      component);
}

std::size_t max_homer_clusters(std::size_t q) {
  std::size_t r = 0;
  while (r * r < q) ++r;
  return std::max<std::size_t>(r, 2);
}

ComponentDraw draw_component(Family family, std::size_t q, Rng& rng) {
  ComponentDraw draw;
  draw.family = family;
  if (family == Family::homer) {
    static constexpr Clustering kMethods[] = {Clustering::random, Clustering::kmeans,
                                              Clustering::balanced_kmeans};
    draw.clustering = kMethods[rng.uniform_index(3)];
    const std::size_t k_max = max_homer_clusters(q);
    draw.k = 2 + rng.uniform_index(k_max - 1);
  } else {
    draw.order = random_permutation(q, rng);
  }
  draw.kernel = rng.uniform_index(2) == 0 ? Kernel::linear : Kernel::radial;
  draw.seed = rng.next();
  return draw;
}

Component train_component(const Dataset& data, std::span<const double> instance_weights,
                          const ComponentDraw& draw, const BinaryLearnerSpec& base) {
  BinaryLearnerSpec spec = base;
  spec.kernel = draw.kernel;
  spec.seed = draw.seed;
  if (draw.family == Family::homer) {
    return train_homer(data, instance_weights, HomerParams{draw.clustering, draw.k}, spec);
  }
  return train_cc(data, instance_weights, draw.order, spec);
}

}  // namespace mlkfhe
