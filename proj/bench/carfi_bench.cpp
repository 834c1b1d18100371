#include <benchmark/benchmark.h>

#include "carfi/arf.hpp"
#include "carfi/common.hpp"
#include "carfi/density.hpp"
#include "carfi/importance.hpp"
#include "carfi/learners.hpp"
#include "carfi/reference.hpp"
#include "carfi/simgen.hpp"

using namespace carfi;

namespace {

struct Setup {
  Dataset train, test;
  std::unique_ptr<Learner> learner;
  DensityModel model;
};

const Setup& setup() {
  static const Setup s = [] {
    constexpr std::size_t p = 10;
    const auto data = gen_toeplitz(2000, p, default_betas(p), Setting::Linear, 7);
    auto [train, test] = split(data, 0.5, 8);
    auto learner = fit_lm(train);
    ArfConfig cfg;
    cfg.seed = 9;
    auto model = forde(fit_arf(train.split_target().first, cfg));
    return Setup{std::move(train), std::move(test), std::move(learner), std::move(model)};
  }();
  return s;
}

ImportanceQuery query() { return ImportanceQuery{{3}, std::nullopt, 10, LossFn::MSE, 11}; }

void BM_CarfiReference(benchmark::State& state) {
  const auto& s = setup();
  for (auto _ : state) benchmark::DoNotOptimize(reference::carfi(s.test, *s.learner, s.model, query()));
}

void BM_CarfiKernel(benchmark::State& state) {
  const auto& s = setup();
  set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(carfi::carfi(s.test, *s.learner, s.model, query()));
}

void BM_FitForestReference(benchmark::State& state) {
  const auto& s = setup();
  const auto [x, y] = s.train.split_target();
  ForestParams params;
  params.num_trees = 20;
  for (auto _ : state) benchmark::DoNotOptimize(reference::fit_forest(x, y, Task::Regression, params, 3));
}

void BM_FitForest(benchmark::State& state) {
  const auto& s = setup();
  const auto [x, y] = s.train.split_target();
  ForestParams params;
  params.num_trees = 20;
  set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_forest(x, y, Task::Regression, params, 3));
}

}  // namespace

BENCHMARK(BM_CarfiReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CarfiKernel)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FitForestReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FitForest)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
