// Prefix-sum OpenMP kernels against the serial direct-definition reference.

#include <benchmark/benchmark.h>

#include <map>

#include "bmse/estimators.hpp"
#include "bmse/reference.hpp"
#include "bmse/var1.hpp"

namespace {

const bmse::ChainMatrix& chain_of(Eigen::Index n, Eigen::Index p) {
  static std::map<std::pair<Eigen::Index, Eigen::Index>, bmse::ChainMatrix> cache;
  auto it = cache.find({n, p});
  if (it == cache.end()) {
    const auto spec = bmse::make_var1(bmse::make_phi(p, 0.9, 7));
    it = cache.emplace(std::make_pair(n, p), bmse::simulate(spec, n, 11)).first;
  }
  return it->second;
}

void BM_ObmPrefix(benchmark::State& state) {
  const auto& chain = chain_of(state.range(0), 5);
  for (auto _ : state) benchmark::DoNotOptimize(bmse::obm(chain, state.range(1)).sigma.data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ObmReference(benchmark::State& state) {
  const auto& chain = chain_of(state.range(0), 5);
  for (auto _ : state) benchmark::DoNotOptimize(bmse::reference::obm_naive(chain, state.range(1)).data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_FlatTopObmPrefix(benchmark::State& state) {
  const auto& chain = chain_of(state.range(0), 5);
  for (auto _ : state) benchmark::DoNotOptimize(bmse::flat_top_obm(chain, state.range(1)).sigma.data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BmDirect(benchmark::State& state) {
  const auto& chain = chain_of(state.range(0), 5);
  for (auto _ : state) benchmark::DoNotOptimize(bmse::bm(chain, state.range(1)).sigma.data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_ObmPrefix)->Args({100000, 46})->Args({100000, 316})->Args({1000000, 100})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ObmReference)->Args({100000, 46})->Args({100000, 316})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FlatTopObmPrefix)->Args({1000000, 100})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BmDirect)->Args({1000000, 100})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
