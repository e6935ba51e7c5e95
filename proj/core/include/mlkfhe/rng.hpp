#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace mlkfhe {

/// SplitMix64 finalizer; used to derive independent substream seeds.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

/// Seed for the substream addressed by `path` under `root`. Substreams are
/// keyed by counters, so adding components or folds never perturbs the
/// seeds of earlier ones.
std::uint64_t derive_seed(std::uint64_t root,
                          std::initializer_list<std::uint64_t> path) noexcept;

/// Seeded random source. Sampling routines are written against the raw
/// 64-bit engine output so that results do not depend on the standard
/// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform();

  /// Uniform integer in [0, n). n must be > 0.
  std::size_t uniform_index(std::size_t n);

  /// Standard normal (Box-Muller).
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[uniform_index(i)]);
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    shuffle(std::span<T>(items));
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Draws `draws` indices with replacement from the (unnormalized) weights
/// and returns how often each index was drawn.
std::vector<double> weighted_resample_counts(std::span<const double> weights,
                                             std::size_t draws, Rng& rng);

/// Uniform bootstrap sample of `draws` indices in [0, n), with replacement.
std::vector<std::size_t> bootstrap_sample(std::size_t n, std::size_t draws,
                                          Rng& rng);

/// Multiplicity of each index in `sample`, as weights over [0, n).
std::vector<double> sample_counts(std::span<const std::size_t> sample,
                                  std::size_t n);

}  // namespace mlkfhe
