#include <benchmark/benchmark.h>

#include <random>

#include "pkgpulse/devrec.hpp"
#include "pkgpulse/forest.hpp"
#include "pkgpulse/metrics.hpp"
#include "pkgpulse/synth.hpp"
#include "pkgpulse/urgency.hpp"

namespace {

using namespace pkgpulse;

void BM_KendallTau(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> v(0, 50);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = v(rng);
    b[i] = v(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(kendall_tau(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KendallTau)->RangeMultiplier(4)->Range(256, 65536)->Complexity(benchmark::oNLogN);

void BM_ForestFit(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  const auto n = static_cast<std::size_t>(state.range(0));
  DesignMatrix X(std::vector<std::string>{"a", "b", "c", "d", "e", "f", "g", "h"});
  std::vector<double> y;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> r(8);
    for (auto& x : r) x = g(rng);
    y.push_back(r[0] + r[1] * r[2] + g(rng));
    X.append(r);
  }
  ForestHyper h;
  h.max_depth = 7;
  h.min_samples_leaf = 5;
  for (auto _ : state) benchmark::DoNotOptimize(forest_fit(X, y, h));
}
BENCHMARK(BM_ForestFit)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

const Corpus& corpus() {
  static const Corpus c = [] {
    SynthConfig cfg;
    cfg.packages = 1000;
    return synthesize(cfg).corpus;
  }();
  return c;
}

void BM_UrgencyFeatures(benchmark::State& state) {
  const Corpus& c = corpus();
  const int t = c.last_index();
  const auto names = c.at(t).package_names();
  for (auto _ : state)
    for (const auto& p : names) benchmark::DoNotOptimize(urgency_features(c, p, t, FeatureMode::AutoDepn));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * names.size()));
}
BENCHMARK(BM_UrgencyFeatures)->Unit(benchmark::kMillisecond);

void BM_BuildInstances(benchmark::State& state) {
  const Corpus& c = corpus();
  for (auto _ : state)
    benchmark::DoNotOptimize(build_instances(c, CandidatePolicy::MainDepn, DevFeatureSet::AutoDepn, 5, c.last_index()));
}
BENCHMARK(BM_BuildInstances)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
