#include "ledgermine/miner.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ledgermine/error.hpp"

namespace ledgermine {

std::vector<Window> MinerConfig::default_window_grid() {
  return {
      {0, 1 * kSecondsPerHour},
      {1 * kSecondsPerHour, 2 * kSecondsPerHour},
      {2 * kSecondsPerHour, 4 * kSecondsPerHour},
      {4 * kSecondsPerHour, 8 * kSecondsPerHour},
      {8 * kSecondsPerHour, 24 * kSecondsPerHour},
  };
}

nlohmann::json Hypothesis::to_json() const {
  return {{"antecedent", antecedent}, {"outcome", outcome},
          {"window_s", {window.lo_s, window.hi_s}}, {"support", support},
          {"confidence", confidence}, {"lift", lift}};
}

Hypothesis Hypothesis::from_json(const nlohmann::json& j) {
  Hypothesis h;
  h.antecedent = j.at("antecedent").get<std::string>();
  h.outcome = j.at("outcome").get<std::string>();
  if (j.contains("window_s")) {
    const auto& w = j.at("window_s");
    if (!w.is_array() || w.size() != 2) {
      throw Error(Errc::parse_error, "hypothesis window_s must be a [lo,hi] pair");
    }
    h.window = {w[0].get<std::int64_t>(), w[1].get<std::int64_t>()};
  } else {
    const auto& w = j.at("window_h");
    if (!w.is_array() || w.size() != 2) {
      throw Error(Errc::parse_error, "hypothesis window_h must be a [lo,hi] pair");
    }
    h.window = {static_cast<std::int64_t>(std::llround(w[0].get<double>() * kSecondsPerHour)),
                static_cast<std::int64_t>(std::llround(w[1].get<double>() * kSecondsPerHour))};
  }
  h.support = j.value("support", std::int64_t{0});
  h.confidence = j.value("confidence", 0.0);
  h.lift = j.value("lift", 0.0);
  return h;
}

MinerConfig MinerConfig::from_json(const nlohmann::json& j) {
  MinerConfig c;
  if (!j.is_object()) throw Error(Errc::invalid_config, "miner config must be a JSON object");
  c.min_count = j.value("min_count", c.min_count);
  c.min_support = j.value("min_support", c.min_support);
  c.min_lift = j.value("min_lift", c.min_lift);
  if (j.contains("windows_h")) {
    c.windows.clear();
    for (const auto& w : j["windows_h"]) {
      if (!w.is_array() || w.size() != 2) {
        throw Error(Errc::invalid_config, "windows_h entries must be [lo,hi] pairs of hours");
      }
      c.windows.push_back(
          {static_cast<std::int64_t>(std::llround(w[0].get<double>() * kSecondsPerHour)),
           static_cast<std::int64_t>(std::llround(w[1].get<double>() * kSecondsPerHour))});
    }
  }
  c.validate();
  return c;
}

void MinerConfig::validate() const {
  if (windows.empty()) {
    throw Error(Errc::invalid_config, "miner window grid must be nonempty");
  }
  for (const auto& w : windows) {
    if (w.lo_s < 0 || w.lo_s > w.hi_s) {
      throw Error(Errc::window_error,
                  "miner window [" + std::to_string(w.lo_s) + "," +
                      std::to_string(w.hi_s) + "]s violates 0 <= a <= b");
    }
  }
  if (min_support < 1) {
    throw Error(Errc::invalid_config, "min_support must be >= 1");
  }
  if (min_count < 1) {
    throw Error(Errc::invalid_config, "min_count must be >= 1");
  }
  if (min_lift < 0) {
    throw Error(Errc::invalid_config, "min_lift must be >= 0");
  }
}

namespace {

bool occurrence_before(const Occurrence& a, const Occurrence& b) {
  if (a.anchor_time != b.anchor_time) return a.anchor_time < b.anchor_time;
  return a.event_ids < b.event_ids;
}

bool ids_disjoint(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  for (const auto& x : a) {
    if (std::find(b.begin(), b.end(), x) != b.end()) return false;
  }
  return true;
}

std::vector<Occurrence> match_rec(std::span<const Event> events, const Pattern& pattern,
                                  const Taxonomy& taxonomy) {
  if (pattern.is_atom()) {
    std::vector<Occurrence> out;
    for (const Event& e : events) {
      if (taxonomy.type_matches(e.type, pattern.atom_type())) {
        out.push_back({{e.id}, e.timestamp});
      }
    }
    return out;  // ledger order == (anchor, id) order for atoms
  }

  std::vector<Occurrence> lefts = match_rec(events, pattern.left(), taxonomy);
  std::vector<Occurrence> rights = match_rec(events, pattern.right(), taxonomy);
  const auto [lo, hi] = pattern.window();

  std::vector<bool> consumed(rights.size(), false);
  std::vector<Occurrence> out;
  for (const Occurrence& l : lefts) {
    const Instant from = l.anchor_time + lo;
    const Instant to = l.anchor_time + hi;
    auto it = std::lower_bound(rights.begin(), rights.end(), from,
                               [](const Occurrence& o, Instant t) { return o.anchor_time < t; });
    for (; it != rights.end() && it->anchor_time <= to; ++it) {
      const std::size_t idx = static_cast<std::size_t>(it - rights.begin());
      if (consumed[idx]) continue;
      if (!ids_disjoint(l.event_ids, it->event_ids)) continue;
      consumed[idx] = true;
      Occurrence combined;
      combined.event_ids = l.event_ids;
      combined.event_ids.insert(combined.event_ids.end(), it->event_ids.begin(),
                                it->event_ids.end());
      combined.anchor_time = it->anchor_time;
      out.push_back(std::move(combined));
      break;
    }
  }
  std::sort(out.begin(), out.end(), occurrence_before);
  return out;
}

std::vector<Instant> type_times(std::span<const Event> events, const std::string& type,
                                const Taxonomy& taxonomy) {
  std::vector<Instant> out;
  for (const Event& e : events) {
    if (taxonomy.type_matches(e.type, type)) out.push_back(e.timestamp);
  }
  return out;
}

// Core of association_stats over pre-extracted sorted timestamp arrays.
std::int64_t count_supported(const std::vector<Instant>& antecedents,
                             const std::vector<Instant>& outcomes, Window w) {
  std::int64_t support = 0;
  for (const Instant t : antecedents) {
    const auto it = std::lower_bound(outcomes.begin(), outcomes.end(), t + w.lo_s);
    if (it != outcomes.end() && *it <= t + w.hi_s) ++support;
  }
  return support;
}

AssociationStats stats_from_times(const std::vector<Instant>& antecedents,
                                  const std::vector<Instant>& outcomes, Window w,
                                  std::int64_t span_s) {
  AssociationStats s;
  s.antecedent_count = static_cast<std::int64_t>(antecedents.size());
  s.outcome_count = static_cast<std::int64_t>(outcomes.size());
  s.support = count_supported(antecedents, outcomes, w);
  s.confidence = static_cast<double>(s.support) / static_cast<double>(s.antecedent_count);
  if (s.outcome_count == 0) {
    s.lift = 0.0;
    return s;
  }
  const double rate = static_cast<double>(s.outcome_count) / static_cast<double>(span_s);
  const double width = static_cast<double>(w.hi_s - w.lo_s + 1);  // +1s guards zero-width
  const double baseline = 1.0 - std::exp(-rate * width);
  s.lift = s.confidence / baseline;
  return s;
}

}  // namespace

std::vector<Occurrence> match_pattern(std::span<const Event> events, const Pattern& pattern,
                                      const Taxonomy& taxonomy) {
  validate_pattern(pattern, taxonomy);
  return match_rec(events, pattern, taxonomy);
}

AssociationStats association_stats(const Ledger& ledger, const std::string& antecedent_type,
                                   const std::string& outcome_type, Window window,
                                   const Taxonomy& taxonomy) {
  if (window.lo_s < 0 || window.lo_s > window.hi_s) {
    throw Error(Errc::window_error, "association window violates 0 <= a <= b");
  }
  if (!taxonomy.contains(antecedent_type)) {
    throw Error(Errc::unknown_event_type, "type '" + antecedent_type + "' not in taxonomy");
  }
  if (!taxonomy.contains(outcome_type)) {
    throw Error(Errc::unknown_event_type, "type '" + outcome_type + "' not in taxonomy");
  }
  const auto antecedents = type_times(ledger.events(), antecedent_type, taxonomy);
  if (antecedents.empty()) {
    throw Error(Errc::no_antecedent_events, "no events of type '" + antecedent_type + "'");
  }
  if (ledger.span_seconds() == 0) {
    throw Error(Errc::degenerate_span, "ledger span is zero");
  }
  const auto outcomes = type_times(ledger.events(), outcome_type, taxonomy);
  return stats_from_times(antecedents, outcomes, window, ledger.span_seconds());
}

std::vector<Hypothesis> mine_associations(const Ledger& ledger, const Taxonomy& taxonomy,
                                          const MinerConfig& config) {
  config.validate();
  if (ledger.empty()) {
    throw Error(Errc::empty_ledger, "cannot mine an empty ledger");
  }
  if (ledger.span_seconds() == 0) {
    throw Error(Errc::degenerate_span, "ledger span is zero");
  }

  // Candidate generation is restricted to depth-1 antecedents over leaf
  // types; composite antecedents stay matchable through match_pattern.
  std::map<std::string, std::vector<Instant>> times_by_leaf;
  for (const auto& leaf : taxonomy.leaves()) {
    times_by_leaf.emplace(leaf, std::vector<Instant>{});
  }
  for (const Event& e : ledger) {
    auto it = times_by_leaf.find(e.type);
    if (it != times_by_leaf.end()) it->second.push_back(e.timestamp);
  }
  std::vector<const std::pair<const std::string, std::vector<Instant>>*> eligible;
  for (const auto& entry : times_by_leaf) {
    if (static_cast<std::int64_t>(entry.second.size()) >= config.min_count) {
      eligible.push_back(&entry);
    }
  }

  const std::int64_t span_s = ledger.span_seconds();
  std::vector<Hypothesis> out;
  for (const auto* a : eligible) {
    for (const auto* b : eligible) {
      if (a == b) continue;
      for (const Window& w : config.windows) {
        const AssociationStats s = stats_from_times(a->second, b->second, w, span_s);
        if (s.support < config.min_support || s.lift < config.min_lift) continue;
        Hypothesis h;
        h.antecedent = a->first;
        h.outcome = b->first;
        h.window = w;
        h.support = s.support;
        h.confidence = s.confidence;
        h.lift = s.lift;
        out.push_back(std::move(h));
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Hypothesis& x, const Hypothesis& y) {
    if (x.lift != y.lift) return x.lift > y.lift;
    if (x.confidence != y.confidence) return x.confidence > y.confidence;
    if (x.antecedent != y.antecedent) return x.antecedent < y.antecedent;
    if (x.outcome != y.outcome) return x.outcome < y.outcome;
    return x.window < y.window;
  });
  return out;
}

}  // namespace ledgermine
