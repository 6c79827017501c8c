#include <benchmark/benchmark.h>

#include "ledgermine/miner.hpp"
#include "ledgermine/synth.hpp"
#include "support/scenarios.hpp"

using namespace ledgermine;

namespace {

static void BM_MineAssociations(benchmark::State& state) {
  Scenario sc = testing::recovery_scenario(3);
  sc.span_days = state.range(0);
  const SynthOutput out = generate(sc);
  MinerConfig cfg;
  cfg.min_count = 10;
  cfg.min_support = 5;
  cfg.min_lift = 1.2;
  for (auto _ : state) {
    auto ranked = mine_associations(out.ledger, out.taxonomy, cfg);
    benchmark::DoNotOptimize(ranked);
  }
  state.SetItemsProcessed(state.iterations() * out.ledger.size());
}
BENCHMARK(BM_MineAssociations)->Arg(30)->Arg(60)->Arg(120);

static void BM_SynthGenerate(benchmark::State& state) {
  Scenario sc = testing::performance_scenario(5);
  sc.span_days = state.range(0);
  for (auto _ : state) {
    auto out = generate(sc);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_SynthGenerate)->Arg(10)->Arg(35)->Arg(70);

}  // namespace
