#include <benchmark/benchmark.h>

#include "sbmsi/treesim.hpp"

namespace {

void BM_SampleTreeAndRecurse(benchmark::State& state) {
  const auto p = sbmsi::validate_params(0, 15, 5, 0.2);
  const sbmsi::Derived dc = sbmsi::derived_constants(p);
  const auto depth = static_cast<unsigned>(state.range(0));
  std::uint64_t seed = 0;
  std::int64_t nodes = 0;
  for (auto _ : state) {
    const sbmsi::GwTree t = sbmsi::sample_gw_tree(p, depth, ++seed);
    benchmark::DoNotOptimize(sbmsi::recurse_llr(t, dc)[0]);
    nodes += static_cast<std::int64_t>(t.size());
  }
  state.SetItemsProcessed(nodes);
}
BENCHMARK(BM_SampleTreeAndRecurse)->Arg(2)->Arg(3)->Arg(4);

void BM_PooledRoots(benchmark::State& state) {
  const auto p = sbmsi::validate_params(0, 990, 900, 0.3);
  sbmsi::TreeSimOptions o;
  o.engine = sbmsi::TreeEngine::Pooled;
  const auto replicas = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sbmsi::sample_root_statistics(p, 3, replicas, 1, o).size());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PooledRoots)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace
