#include <benchmark/benchmark.h>

#include "ledgermine/miner.hpp"
#include "ledgermine/rng.hpp"
#include "support/generators.hpp"

using namespace ledgermine;

namespace {

static void BM_MatchAtomPair(benchmark::State& state) {
  const auto types = testing::type_pool(8);
  const Taxonomy tax = testing::flat_taxonomy(types);
  Rng rng(1);
  const Ledger ledger = testing::random_ledger(
      rng, types, tax, static_cast<std::size_t>(state.range(0)), 60 * kSecondsPerDay);
  const Pattern pattern = parse_pattern("t0 W[1,4] t1");
  for (auto _ : state) {
    auto occ = match_pattern(ledger.events(), pattern, tax);
    benchmark::DoNotOptimize(occ);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MatchAtomPair)->Range(1 << 10, 1 << 17);

static void BM_MatchChain(benchmark::State& state) {
  const auto types = testing::type_pool(4);
  const Taxonomy tax = testing::flat_taxonomy(types);
  Rng rng(2);
  const Ledger ledger = testing::random_ledger(
      rng, types, tax, static_cast<std::size_t>(state.range(0)), 30 * kSecondsPerDay);
  const Pattern pattern = parse_pattern("t0 W[0,2] t1 W[0,2] t2");
  for (auto _ : state) {
    auto occ = match_pattern(ledger.events(), pattern, tax);
    benchmark::DoNotOptimize(occ);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MatchChain)->Range(1 << 10, 1 << 16);

}  // namespace
