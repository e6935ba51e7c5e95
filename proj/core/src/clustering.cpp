#include "mlkfhe/clustering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mlkfhe {

std::string_view to_string(Clustering method) {
  switch (method) {
    case Clustering::random: return "random";
    case Clustering::kmeans: return "kmeans";
    case Clustering::balanced_kmeans: return "balanced";
  }
  return "unknown";
}

Clustering parse_clustering(std::string_view text) {
  if (text == "random") return Clustering::random;
  if (text == "kmeans" || text == "k-means") return Clustering::kmeans;
  if (text == "balanced" || text == "balanced-kmeans" || text == "balanced_kmeans") {
    return Clustering::balanced_kmeans;
  }
  throw std::invalid_argument("unknown clustering method '" + std::string(text) + "'");
}

namespace {

constexpr int kMaxLloydIterations = 100;
constexpr int kMaxBalancedIterations = 20;

// Labels as weighted points: points(l, i) = Y(i, label_l).
class LabelPoints {
 public:
  LabelPoints(const LabelMatrix& labels, std::span<const double> weights,
              std::span<const std::size_t> subset)
      : weights_(weights.begin(), weights.end()) {
    points_.resize(static_cast<Eigen::Index>(subset.size()), labels.rows());
    for (std::size_t l = 0; l < subset.size(); ++l) {
      for (Eigen::Index i = 0; i < labels.rows(); ++i) {
        points_(static_cast<Eigen::Index>(l), i) =
            labels(i, static_cast<Eigen::Index>(subset[l]));
      }
    }
  }

  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }

  double distance(std::size_t item, const Vector& centroid) const {
    double acc = 0.0;
    const auto row = points_.row(static_cast<Eigen::Index>(item));
    for (Eigen::Index i = 0; i < centroid.size(); ++i) {
      const double diff = row[i] - centroid[i];
      acc += weights_[static_cast<std::size_t>(i)] * diff * diff;
    }
    return acc;
  }

  Vector point(std::size_t item) const {
    return points_.row(static_cast<Eigen::Index>(item)).transpose();
  }

  std::vector<Vector> centroids(const std::vector<std::size_t>& assignment,
                                std::size_t k) const {
    std::vector<Vector> c(k, Vector::Zero(points_.cols()));
    std::vector<std::size_t> count(k, 0);
    for (std::size_t item = 0; item < assignment.size(); ++item) {
      c[assignment[item]] += points_.row(static_cast<Eigen::Index>(item)).transpose();
      ++count[assignment[item]];
    }
    for (std::size_t g = 0; g < k; ++g) {
      if (count[g] > 0) c[g] /= static_cast<double>(count[g]);
    }
    return c;
  }

 private:
  Matrix points_;
  std::vector<double> weights_;
};

std::vector<Vector> kmeans_plus_plus(const LabelPoints& pts, std::size_t k, Rng& rng) {
  const std::size_t m = pts.size();
  std::vector<std::size_t> chosen{rng.uniform_index(m)};
  std::vector<Vector> centers{pts.point(chosen.front())};
  std::vector<double> nearest(m, std::numeric_limits<double>::infinity());
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t item = 0; item < m; ++item) {
      nearest[item] = std::min(nearest[item], pts.distance(item, centers.back()));
      total += nearest[item];
    }
    std::size_t pick = m;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (std::size_t item = 0; item < m; ++item) {
        if (nearest[item] <= 0.0) continue;
        pick = item;
        if (u < nearest[item]) break;
        u -= nearest[item];
      }
    } else {
      // Every remaining item coincides with a center: pick an unused one.
      std::vector<std::size_t> unused;
      for (std::size_t item = 0; item < m; ++item) {
        if (std::find(chosen.begin(), chosen.end(), item) == chosen.end()) {
          unused.push_back(item);
        }
      }
      pick = unused[rng.uniform_index(unused.size())];
    }
    chosen.push_back(pick);
    centers.push_back(pts.point(pick));
  }
  return centers;
}

std::size_t nearest_center(const LabelPoints& pts, std::size_t item,
                           const std::vector<Vector>& centers) {
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < centers.size(); ++g) {
    const double dist = pts.distance(item, centers[g]);
    if (dist < best_dist) {
      best_dist = dist;
      best = g;
    }
  }
  return best;
}

// Moves the worst-fitting items of multi-member clusters into empty ones.
void repair_empty(const LabelPoints& pts, std::vector<std::size_t>& assignment,
                  std::size_t k) {
  for (;;) {
    std::vector<std::size_t> count(k, 0);
    for (std::size_t a : assignment) ++count[a];
    const auto empty = std::find(count.begin(), count.end(), std::size_t{0});
    if (empty == count.end()) return;
    const auto centers = pts.centroids(assignment, k);
    std::size_t donor = assignment.size();
    double worst = -1.0;
    for (std::size_t item = 0; item < assignment.size(); ++item) {
      if (count[assignment[item]] < 2) continue;
      const double dist = pts.distance(item, centers[assignment[item]]);
      if (dist > worst) {
        worst = dist;
        donor = item;
      }
    }
    assignment[donor] = static_cast<std::size_t>(empty - count.begin());
  }
}

std::vector<std::size_t> lloyd(const LabelPoints& pts, std::size_t k, Rng& rng) {
  const std::size_t m = pts.size();
  auto centers = kmeans_plus_plus(pts, k, rng);
  std::vector<std::size_t> assignment(m, 0);
  for (int it = 0; it < kMaxLloydIterations; ++it) {
    std::vector<std::size_t> next(m);
    for (std::size_t item = 0; item < m; ++item) next[item] = nearest_center(pts, item, centers);
    repair_empty(pts, next, k);
    const bool stable = it > 0 && next == assignment;
    assignment = std::move(next);
    if (stable) break;
    centers = pts.centroids(assignment, k);
  }
  return assignment;
}

std::vector<std::size_t> balance(const LabelPoints& pts, std::size_t k,
                                 std::vector<std::size_t> assignment) {
  const std::size_t m = pts.size();
  const std::size_t base = m / k;
  const std::size_t big_slots = m % k;
  for (int it = 0; it < kMaxBalancedIterations; ++it) {
    const auto centers = pts.centroids(assignment, k);
    std::vector<std::vector<double>> dist(m, std::vector<double>(k));
    std::vector<double> gap(m);
    for (std::size_t item = 0; item < m; ++item) {
      for (std::size_t g = 0; g < k; ++g) dist[item][g] = pts.distance(item, centers[g]);
      std::vector<double> sorted = dist[item];
      std::sort(sorted.begin(), sorted.end());
      gap[item] = sorted.size() > 1 ? sorted[1] - sorted[0] : 0.0;
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return gap[a] > gap[b]; });

    // Capacity base + 1 until `big_slots` clusters have used it, base after.
    std::vector<std::size_t> size(k, 0);
    std::size_t big_used = 0;
    std::vector<std::size_t> next(m);
    for (std::size_t item : order) {
      std::size_t best = k;
      double best_dist = std::numeric_limits<double>::infinity();
      for (std::size_t g = 0; g < k; ++g) {
        const std::size_t cap = big_used < big_slots ? base + 1 : base;
        if (size[g] >= cap) continue;
        if (dist[item][g] < best_dist) {
          best_dist = dist[item][g];
          best = g;
        }
      }
      next[item] = best;
      if (++size[best] == base + 1) ++big_used;
    }
    const bool stable = next == assignment;
    assignment = std::move(next);
    if (stable) break;
  }
  return assignment;
}

std::vector<std::size_t> random_assignment(std::size_t m, std::size_t k, Rng& rng) {
  std::vector<std::size_t> items(m);
  std::iota(items.begin(), items.end(), std::size_t{0});
  rng.shuffle(items);
  std::vector<std::size_t> assignment(m);
  for (std::size_t pos = 0; pos < m; ++pos) {
    assignment[items[pos]] = pos < k ? pos : rng.uniform_index(k);
  }
  return assignment;
}

LabelGroups to_groups(std::span<const std::size_t> subset,
                      const std::vector<std::size_t>& assignment, std::size_t k) {
  LabelGroups groups(k);
  for (std::size_t item = 0; item < assignment.size(); ++item) {
    groups[assignment[item]].push_back(subset[item]);
  }
  for (auto& g : groups) std::sort(g.begin(), g.end());
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return groups;
}

}  // namespace

LabelGroups cluster_labels(const LabelMatrix& labels, std::span<const double> instance_weights,
                           std::span<const std::size_t> label_subset, Clustering method,
                           std::size_t k, Rng& rng) {
  if (label_subset.empty()) throw std::invalid_argument("cannot cluster an empty label set");
  if (k < 2) throw std::invalid_argument("cluster count must be >= 2");
  if (instance_weights.size() != static_cast<std::size_t>(labels.rows())) {
    throw std::invalid_argument("instance weights do not match label rows");
  }
  for (std::size_t l : label_subset) {
    if (l >= static_cast<std::size_t>(labels.cols())) {
      throw std::invalid_argument("label index out of range");
    }
  }
  const std::size_t m = label_subset.size();
  if (m <= k) {
    LabelGroups singletons;
    for (std::size_t l : label_subset) singletons.push_back({l});
    std::sort(singletons.begin(), singletons.end());
    return singletons;
  }

  std::vector<std::size_t> assignment;
  if (method == Clustering::random) {
    assignment = random_assignment(m, k, rng);
  } else {
    const LabelPoints pts(labels, instance_weights, label_subset);
    assignment = lloyd(pts, k, rng);
    if (method == Clustering::balanced_kmeans) assignment = balance(pts, k, assignment);
  }
  return to_groups(label_subset, assignment, k);
}

LabelGroups cluster_labels(const Dataset& data, std::span<const std::size_t> label_subset,
                           Clustering method, std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  const auto weights = uniform_weights(data.size());
  return cluster_labels(data.labels, weights, label_subset, method, k, rng);
}

}  // namespace mlkfhe
