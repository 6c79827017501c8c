#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ledgermine/event.hpp"
#include "ledgermine/ledger.hpp"
#include "ledgermine/pattern.hpp"

namespace ledgermine {

// One match of a pattern against the ledger. event_ids follow the
// pattern's atoms in order; anchor_time is the timestamp of the final
// matched event.
struct Occurrence {
  std::vector<std::string> event_ids;
  Instant anchor_time = 0;

  friend bool operator==(const Occurrence&, const Occurrence&) = default;
};

// A candidate directed relationship awaiting causal testing.
struct Hypothesis {
  std::string antecedent;  // canonical DSL string
  std::string outcome;
  Window window;
  std::int64_t support = 0;
  double confidence = 0.0;
  double lift = 0.0;

  nlohmann::json to_json() const;
  static Hypothesis from_json(const nlohmann::json& j);
};

struct MinerConfig {
  std::int64_t min_count = 5;
  std::int64_t min_support = 5;
  double min_lift = 1.5;
  // Log-ish coverage of daily rhythms; overridable.
  std::vector<Window> windows = default_window_grid();

  static std::vector<Window> default_window_grid();
  void validate() const;
  static MinerConfig from_json(const nlohmann::json& j);
};

struct AssociationStats {
  std::int64_t antecedent_count = 0;
  std::int64_t outcome_count = 0;
  std::int64_t support = 0;
  double confidence = 0.0;
  double lift = 0.0;
};

// Declarative matching semantics:
//  - an Atom matches every event whose type equals or descends from it;
//  - Seq(L, R, [a,b]) pairs occurrences of L with occurrences of R whose
//    anchor gap anchor(R) - anchor(L) lies in the closed window,
//    first-match: scanning L-occurrences in time order, each takes the
//    earliest R-occurrence not yet consumed and sharing no event with it.
// Output sorted by (anchor_time, event_ids).
std::vector<Occurrence> match_pattern(std::span<const Event> events, const Pattern& pattern,
                                      const Taxonomy& taxonomy);

// support    = antecedent events with >= 1 outcome event at gap in [a,b]
//              (no pairing/consumption here)
// confidence = support / antecedent count
// lift       = confidence / (1 - exp(-rate_B * (b - a + 1s))), the
//              homogeneous Poisson baseline; 0 when no outcomes exist.
AssociationStats association_stats(const Ledger& ledger, const std::string& antecedent_type,
                                   const std::string& outcome_type, Window window,
                                   const Taxonomy& taxonomy);

// Evaluates every ordered pair of distinct leaf types with enough events
// over the window grid; keeps hypotheses meeting min_support and min_lift,
// ranked by lift desc, then confidence desc, antecedent asc, outcome asc,
// window asc. Deterministic.
std::vector<Hypothesis> mine_associations(const Ledger& ledger, const Taxonomy& taxonomy,
                                          const MinerConfig& config);

}  // namespace ledgermine
