#pragma once

// Seeded random inputs for property-style tests.

#include <string>
#include <vector>

#include "ledgermine/ledger.hpp"
#include "ledgermine/pattern.hpp"
#include "ledgermine/rng.hpp"
#include "ledgermine/taxonomy.hpp"

namespace ledgermine::testing {

inline Taxonomy flat_taxonomy(const std::vector<std::string>& types) {
  Taxonomy tax;
  for (const auto& t : types) tax.add_type(t);
  return tax;
}

inline std::vector<std::string> type_pool(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("t" + std::to_string(i));
  return out;
}

inline Ledger random_ledger(Rng& rng, const std::vector<std::string>& types,
                            const Taxonomy& taxonomy, std::size_t n_events,
                            std::int64_t span_s) {
  std::vector<Event> events;
  for (std::size_t i = 0; i < n_events; ++i) {
    Event e;
    e.id = "e" + std::to_string(i);
    e.type = types[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(types.size()) - 1))];
    e.timestamp = rng.uniform_int(0, span_s);
    e.source = "gen";
    events.push_back(std::move(e));
  }
  return Ledger::from_events(std::move(events), taxonomy);
}

// Windows land on the grammar's 0.01h grid so the DSL can express them.
inline Window random_window(Rng& rng, std::int64_t max_hundredth_hours = 2400) {
  const std::int64_t a = rng.uniform_int(0, max_hundredth_hours);
  const std::int64_t b = rng.uniform_int(a, max_hundredth_hours);
  return Window{a * 36, b * 36};
}

inline Pattern random_pattern(Rng& rng, const std::vector<std::string>& types,
                              std::size_t depth) {
  if (depth <= 1 || rng.bernoulli(0.3)) {
    return Pattern::atom(types[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(types.size()) - 1))]);
  }
  Pattern left = random_pattern(rng, types, depth - 1);
  Pattern right = random_pattern(rng, types, depth - 1);
  return Pattern::seq(std::move(left), std::move(right), random_window(rng));
}

}  // namespace ledgermine::testing
