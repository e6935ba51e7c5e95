#include "mlkfhe/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mlkfhe {

std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t root,
                          std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t s = mix_seed(root);
  for (std::uint64_t p : path) s = mix_seed(s ^ mix_seed(p + 0x632be59bd9b4e019ULL));
  return s;
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  // Rejection sampling keeps the draw exactly uniform.
  const std::uint64_t range = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return static_cast<std::size_t>(x % range);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::vector<double> weighted_resample_counts(std::span<const double> weights,
                                             std::size_t draws, Rng& rng) {
  if (weights.empty()) throw std::invalid_argument("resample: empty weights");
  std::vector<double> cumulative(weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) {
      throw std::invalid_argument("resample: negative weight");
    }
    total += weights[i];
    cumulative[i] = total;
  }
  if (!(total > 0.0)) throw std::invalid_argument("resample: zero total weight");

  std::vector<double> counts(weights.size(), 0.0);
  for (std::size_t d = 0; d < draws; ++d) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t idx = it == cumulative.end()
                          ? weights.size() - 1
                          : static_cast<std::size_t>(it - cumulative.begin());
    // Never land on a zero-weight entry because of rounding at the top end.
    while (weights[idx] <= 0.0 && idx > 0) --idx;
    counts[idx] += 1.0;
  }
  return counts;
}

std::vector<std::size_t> bootstrap_sample(std::size_t n, std::size_t draws,
                                          Rng& rng) {
  if (n == 0) throw std::invalid_argument("bootstrap_sample: n must be > 0");
  std::vector<std::size_t> sample(draws);
  for (auto& s : sample) s = rng.uniform_index(n);
  return sample;
}

std::vector<double> sample_counts(std::span<const std::size_t> sample,
                                  std::size_t n) {
  std::vector<double> counts(n, 0.0);
  for (std::size_t s : sample) {
    if (s >= n) throw std::out_of_range("sample index out of range");
    counts[s] += 1.0;
  }
  return counts;
}

}  // namespace mlkfhe
