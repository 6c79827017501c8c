#include <doctest.h>

#include <sstream>

#include "ledgermine/error.hpp"
#include "ledgermine/miner.hpp"
#include "ledgermine/rng.hpp"
#include "ledgermine/synth.hpp"
#include "support/generators.hpp"
#include "support/reference.hpp"
#include "support/scenarios.hpp"

using namespace ledgermine;

namespace {

Event make_event(const std::string& id, const std::string& type, Instant ts) {
  Event e;
  e.id = id;
  e.type = type;
  e.timestamp = ts;
  e.source = "test";
  return e;
}

// A@0h, A@10h, B@3h, B@11h, B@14h.
Ledger ab_ledger(const Taxonomy& tax) {
  std::vector<Event> events = {
      make_event("a0", "a", 0),
      make_event("a1", "a", 10 * kSecondsPerHour),
      make_event("b0", "b", 3 * kSecondsPerHour),
      make_event("b1", "b", 11 * kSecondsPerHour),
      make_event("b2", "b", 14 * kSecondsPerHour),
  };
  return Ledger::from_events(std::move(events), tax);
}

std::string dump_hypotheses(const std::vector<Hypothesis>& hs) {
  std::ostringstream out;
  for (const auto& h : hs) out << h.to_json().dump() << "\n";
  return out.str();
}

}  // namespace

TEST_SUITE("miner") {

TEST_CASE("empty ledger matches nothing") {
  Taxonomy tax = testing::flat_taxonomy({"a", "b"});
  Ledger empty;
  CHECK(match_pattern(empty.events(), parse_pattern("a W[2,4] b"), tax).empty());
}

TEST_CASE("two-of-three pairing from the A/B ledger") {
  Taxonomy tax = testing::flat_taxonomy({"a", "b"});
  Ledger ledger = ab_ledger(tax);
  const auto occ = match_pattern(ledger.events(), parse_pattern("a W[2,4] b"), tax);
  REQUIRE(occ.size() == 2);
  CHECK(occ[0].event_ids == std::vector<std::string>{"a0", "b0"});
  CHECK(occ[0].anchor_time == 3 * kSecondsPerHour);
  CHECK(occ[1].event_ids == std::vector<std::string>{"a1", "b2"});
  CHECK(occ[1].anchor_time == 14 * kSecondsPerHour);

  // Widening the window never loses occurrences.
  const auto wide = match_pattern(ledger.events(), parse_pattern("a W[0,24] b"), tax);
  CHECK(wide.size() >= occ.size());
}

TEST_CASE("atom matching uses the taxonomy descendant rule") {
  Taxonomy tax = testing::flat_taxonomy({"exercise.bike", "exercise.run", "work"});
  std::vector<Event> events = {
      make_event("e1", "exercise.bike", 0),
      make_event("e2", "exercise.run", 100),
      make_event("w1", "work", 200),
  };
  Ledger ledger = Ledger::from_events(std::move(events), tax);
  CHECK(match_pattern(ledger.events(), Pattern::atom("exercise"), tax).size() == 2);
  CHECK(match_pattern(ledger.events(), Pattern::atom("exercise.bike"), tax).size() == 1);
  CHECK_THROWS_AS(match_pattern(ledger.events(), Pattern::atom("jetpack"), tax), Error);
}

TEST_CASE("a composite occurrence never reuses an event") {
  Taxonomy tax = testing::flat_taxonomy({"a"});
  std::vector<Event> events = {make_event("x", "a", 0)};
  Ledger ledger = Ledger::from_events(std::move(events), tax);
  // Single event cannot satisfy "a then a" even with a zero window.
  CHECK(match_pattern(ledger.events(), parse_pattern("a W[0,0] a"), tax).empty());
}

TEST_CASE("matcher equals the exhaustive oracle (property)") {
  const auto types = testing::type_pool(5);
  Taxonomy tax = testing::flat_taxonomy(types);
  Rng rng(2024);
  for (int round = 0; round < 60; ++round) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(0, 120));
    Ledger ledger =
        testing::random_ledger(rng, types, tax, n, 30 * kSecondsPerHour);
    const Pattern pattern = testing::random_pattern(rng, types, 3);
    const auto got = match_pattern(ledger.events(), pattern, tax);
    const auto expected = testing::oracle_match(ledger.events(), pattern, tax);
    REQUIRE_MESSAGE(got == expected, "pattern: ", format_pattern(pattern), " round ", round);
  }
}

TEST_CASE("association stats on the A/B ledger") {
  Taxonomy tax = testing::flat_taxonomy({"a", "b"});
  Ledger ledger = ab_ledger(tax);
  const auto s = association_stats(ledger, "a", "b",
                                   {2 * kSecondsPerHour, 4 * kSecondsPerHour}, tax);
  CHECK(s.support == 2);
  CHECK(s.confidence == doctest::Approx(1.0));
  CHECK(s.antecedent_count == 2);
  CHECK(s.outcome_count == 3);
  CHECK(s.lift > 1.0);
}

TEST_CASE("association stats error paths") {
  Taxonomy tax = testing::flat_taxonomy({"a", "b", "c"});
  Ledger ledger = ab_ledger(tax);
  CHECK_THROWS_WITH_AS(association_stats(ledger, "c", "b", {0, 3600}, tax),
                       doctest::Contains("NoAntecedentEvents"), Error);
  // No outcomes anywhere: confidence 0, lift 0.
  const auto s = association_stats(ledger, "a", "c", {0, 3600}, tax);
  CHECK(s.confidence == 0.0);
  CHECK(s.lift == 0.0);

  std::vector<Event> same_time = {make_event("x", "a", 100), make_event("y", "b", 100)};
  Ledger degenerate = Ledger::from_events(std::move(same_time), tax);
  CHECK_THROWS_WITH_AS(association_stats(degenerate, "a", "b", {0, 3600}, tax),
                       doctest::Contains("DegenerateSpan"), Error);
}

TEST_CASE("widening the window is monotone for stats (property)") {
  const auto types = testing::type_pool(3);
  Taxonomy tax = testing::flat_taxonomy(types);
  Rng rng(5);
  for (int round = 0; round < 40; ++round) {
    Ledger ledger = testing::random_ledger(rng, types, tax, 80, 50 * kSecondsPerHour);
    const Window w = testing::random_window(rng, 400);
    const Window wider{std::max<std::int64_t>(0, w.lo_s - 3600), w.hi_s + 7200};
    const auto narrow = association_stats(ledger, "t0", "t1", w, tax);
    const auto wide = association_stats(ledger, "t0", "t1", wider, tax);
    CHECK(wide.support >= narrow.support);
    CHECK(wide.confidence >= narrow.confidence);
    const auto occ_narrow =
        match_pattern(ledger.events(), Pattern::seq(Pattern::atom("t0"), Pattern::atom("t1"), w), tax);
    const auto occ_wide = match_pattern(
        ledger.events(), Pattern::seq(Pattern::atom("t0"), Pattern::atom("t1"), wider), tax);
    CHECK(occ_wide.size() >= occ_narrow.size());
  }
}

TEST_CASE("shift invariance of statistics") {
  Taxonomy tax = testing::flat_taxonomy({"a", "b"});
  Ledger ledger = ab_ledger(tax);
  std::vector<Event> shifted;
  for (const auto& e : ledger) {
    Event copy = e;
    copy.timestamp += 1234567;
    shifted.push_back(copy);
  }
  Ledger moved = Ledger::from_events(std::move(shifted), tax);
  const Window w{2 * kSecondsPerHour, 4 * kSecondsPerHour};
  const auto s0 = association_stats(ledger, "a", "b", w, tax);
  const auto s1 = association_stats(moved, "a", "b", w, tax);
  CHECK(s0.support == s1.support);
  CHECK(s0.confidence == s1.confidence);
  CHECK(s0.lift == doctest::Approx(s1.lift).epsilon(1e-12));
}

TEST_CASE("mining a single-type ledger yields nothing") {
  Taxonomy tax = testing::flat_taxonomy({"a"});
  std::vector<Event> events = {make_event("x", "a", 0), make_event("y", "a", 9999)};
  Ledger ledger = Ledger::from_events(std::move(events), tax);
  MinerConfig cfg;
  cfg.min_count = 1;
  cfg.min_support = 1;
  cfg.min_lift = 0.0;
  CHECK(mine_associations(ledger, tax, cfg).empty());
}

TEST_CASE("mining an empty ledger is an error") {
  Taxonomy tax = testing::flat_taxonomy({"a"});
  Ledger empty;
  CHECK_THROWS_WITH_AS(mine_associations(empty, tax, MinerConfig{}),
                       doctest::Contains("EmptyLedger"), Error);
}

TEST_CASE("config validation") {
  Taxonomy tax = testing::flat_taxonomy({"a"});
  std::vector<Event> events = {make_event("x", "a", 0), make_event("y", "a", 1)};
  Ledger ledger = Ledger::from_events(std::move(events), tax);
  MinerConfig no_windows;
  no_windows.windows.clear();
  CHECK_THROWS_AS(mine_associations(ledger, tax, no_windows), Error);
  MinerConfig zero_support;
  zero_support.min_support = 0;
  CHECK_THROWS_AS(mine_associations(ledger, tax, zero_support), Error);
}

TEST_CASE("planted rule is recovered first with confidence near the plant probability") {
  const Scenario sc = [] {
    Scenario s;
    s.span_days = 60;
    s.seed = 9001;
    s.background = {{"noise.n0", 5.0}, {"noise.n1", 5.0}, {"cause.a", 3.0}};
    s.rules = {{"cause.a", "effect.a", 0.8, {2 * kSecondsPerHour, 4 * kSecondsPerHour}}};
    return s;
  }();
  const SynthOutput synth = generate(sc);
  MinerConfig cfg;
  cfg.min_count = 10;
  cfg.min_support = 10;
  cfg.min_lift = 1.2;
  const auto ranked = mine_associations(synth.ledger, synth.taxonomy, cfg);
  REQUIRE_FALSE(ranked.empty());
  CHECK(ranked[0].antecedent == "cause.a");
  CHECK(ranked[0].outcome == "effect.a");
  CHECK(ranked[0].window == Window{2 * kSecondsPerHour, 4 * kSecondsPerHour});
  CHECK(ranked[0].confidence == doctest::Approx(0.8).epsilon(0.0625));  // +-0.05 absolute
}

TEST_CASE("two planted rules rank by lift") {
  Scenario sc;
  sc.span_days = 60;
  sc.seed = 77;
  sc.background = {{"cause.a", 3.0}, {"cause.b", 3.0}, {"noise.n0", 5.0}};
  sc.rules = {{"cause.a", "effect.a", 0.9, {0, 3600}},
              {"cause.b", "effect.b", 0.3, {0, 3600}}};
  const SynthOutput synth = generate(sc);
  MinerConfig cfg;
  cfg.min_count = 10;
  cfg.min_support = 5;
  cfg.min_lift = 1.2;
  const auto ranked = mine_associations(synth.ledger, synth.taxonomy, cfg);
  REQUIRE(ranked.size() >= 2);
  auto rank_of = [&](const std::string& a, const std::string& o) {
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      if (ranked[i].antecedent == a && ranked[i].outcome == o && ranked[i].window == Window{0, 3600}) {
        return i;
      }
    }
    return ranked.size();
  };
  CHECK(rank_of("cause.a", "effect.a") < rank_of("cause.b", "effect.b"));
}

TEST_CASE("mining output is byte-identical across runs") {
  const SynthOutput synth = generate(testing::recovery_scenario(4));
  MinerConfig cfg;
  cfg.min_count = 10;
  cfg.min_support = 5;
  cfg.min_lift = 1.1;
  const auto a = dump_hypotheses(mine_associations(synth.ledger, synth.taxonomy, cfg));
  const auto b = dump_hypotheses(mine_associations(synth.ledger, synth.taxonomy, cfg));
  CHECK(a == b);
  CHECK_FALSE(a.empty());
}

TEST_CASE("mining ignores planted provenance attributes") {
  const SynthOutput synth = generate(testing::recovery_scenario(12));
  std::vector<Event> stripped_events;
  for (const auto& e : synth.ledger) {
    Event copy = e;
    copy.attributes = nlohmann::json::object();
    stripped_events.push_back(copy);
  }
  Ledger stripped = Ledger::from_events(std::move(stripped_events), synth.taxonomy);
  MinerConfig cfg;
  cfg.min_count = 10;
  cfg.min_support = 5;
  cfg.min_lift = 1.1;
  const auto with_attrs = dump_hypotheses(mine_associations(synth.ledger, synth.taxonomy, cfg));
  const auto without = dump_hypotheses(mine_associations(stripped, synth.taxonomy, cfg));
  CHECK(with_attrs == without);
}

TEST_CASE("hypothesis JSON round trip") {
  Hypothesis h;
  h.antecedent = "cause.a";
  h.outcome = "effect.a";
  h.window = {7200, 14400};
  h.support = 42;
  h.confidence = 0.8;
  h.lift = 3.5;
  const Hypothesis back = Hypothesis::from_json(h.to_json());
  CHECK(back.antecedent == h.antecedent);
  CHECK(back.outcome == h.outcome);
  CHECK(back.window == h.window);
  CHECK(back.support == h.support);
  CHECK(back.confidence == doctest::Approx(h.confidence));
  CHECK(back.lift == doctest::Approx(h.lift));
}

}  // TEST_SUITE
