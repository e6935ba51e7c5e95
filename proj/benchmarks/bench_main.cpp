#include <benchmark/benchmark.h>

#include "mlkfhe/binary_learner.hpp"
#include "mlkfhe/ensemble.hpp"
#include "mlkfhe/stratification.hpp"
#include "mlkfhe/synthetic.hpp"

namespace {

mlkfhe::Dataset synthetic(std::size_t n) {
  mlkfhe::SyntheticSpec spec;
  spec.instances = n;
  return mlkfhe::make_synthetic(spec);
}

void BM_FitBinary(benchmark::State& state) {
  const auto data = synthetic(static_cast<std::size_t>(state.range(0)));
  const auto weights = mlkfhe::uniform_weights(data.size());
  std::vector<std::uint8_t> target(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) target[i] = data.labels(static_cast<Eigen::Index>(i), 0);
  mlkfhe::BinaryLearnerSpec spec;
  spec.kernel = state.range(1) ? mlkfhe::Kernel::radial : mlkfhe::Kernel::linear;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mlkfhe::fit_binary(data.features, target, weights, spec));
  }
}
BENCHMARK(BM_FitBinary)->Args({300, 0})->Args({300, 1})->Args({2000, 0});

void BM_TrainKfhe(benchmark::State& state) {
  const auto data = synthetic(300);
  mlkfhe::KfheOptions options;
  options.components = static_cast<std::size_t>(state.range(0));
  options.family = state.range(1) ? mlkfhe::Family::cc : mlkfhe::Family::homer;
  for (auto _ : state) benchmark::DoNotOptimize(mlkfhe::train_ml_kfhe(data, options));
}
BENCHMARK(BM_TrainKfhe)->Args({10, 0})->Args({10, 1})->Unit(benchmark::kMillisecond);

void BM_Stratification(benchmark::State& state) {
  const auto data = synthetic(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mlkfhe::iterative_stratification(data, 5, 1));
}
BENCHMARK(BM_Stratification)->Arg(300)->Arg(3000);

}  // namespace

BENCHMARK_MAIN();
