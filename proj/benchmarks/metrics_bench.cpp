#include <benchmark/benchmark.h>

#include <random>

#include "authentext/ensemble.hpp"
#include "authentext/metrics.hpp"

using namespace authentext;

static void BM_RocAuc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> s(n);
  std::vector<Label> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<Label>(i % 2);
    s[i] = 0.3 * y[i] + u(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(roc_auc(s, y));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_RocAuc)->Arg(1000)->Arg(100000);

static void BM_SoftVote(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> p(3, std::vector<double>(100000));
  for (auto& v : p) {
    for (double& x : v) x = u(rng);
  }
  const std::vector<double> w{1.0, 2.0, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(soft_vote(p, w));
}
BENCHMARK(BM_SoftVote);
