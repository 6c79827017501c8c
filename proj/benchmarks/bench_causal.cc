#include <benchmark/benchmark.h>

#include "ledgermine/causal.hpp"
#include "ledgermine/synth.hpp"
#include "support/scenarios.hpp"

using namespace ledgermine;

namespace {

static void BM_PermutationTest(benchmark::State& state) {
  const SynthOutput out = generate(testing::causal_vs_confounded_scenario(7));
  Hypothesis h;
  h.antecedent = "trigger.walk";
  h.outcome = "outcome.calm";
  h.window = {0, 3600};
  CausalConfig cfg;
  const FairDataset ds = build_fair_dataset(out.ledger, h, {"recent:ctx.party"}, cfg, 1);
  for (auto _ : state) {
    auto r = test_hypothesis(ds, state.range(0), 2);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PermutationTest)->Arg(100)->Arg(1000)->Arg(4000);

static void BM_BuildFairDataset(benchmark::State& state) {
  const SynthOutput out = generate(testing::causal_vs_confounded_scenario(9));
  Hypothesis h;
  h.antecedent = "trigger.walk";
  h.outcome = "outcome.calm";
  h.window = {0, 3600};
  CausalConfig cfg;
  for (auto _ : state) {
    auto ds = build_fair_dataset(out.ledger, h, {"recent:ctx.party"}, cfg, 3);
    benchmark::DoNotOptimize(ds);
  }
}
BENCHMARK(BM_BuildFairDataset);

}  // namespace
