#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "ledgermine/taxonomy.hpp"
#include "ledgermine/time.hpp"

namespace ledgermine {

// One timestamped occurrence in the ledger. Attributes are an opaque bag
// of scalars (string | number | boolean); the engine never interprets
// them beyond optional confounder stratification.
struct Event {
  std::string id;
  std::string type;
  Instant timestamp = 0;
  std::int64_t duration_s = 0;
  nlohmann::json attributes = nlohmann::json::object();
  std::string source;

  friend bool operator==(const Event&, const Event&) = default;
};

// Total order used everywhere a ledger is iterated: (timestamp, id).
inline bool event_before(const Event& a, const Event& b) {
  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
  return a.id < b.id;
}

// Throws MalformedEvent / UnknownEventType on any invariant violation.
void validate_event(const Event& e, const Taxonomy& taxonomy);

// JSONL schema: id, type, ts (ISO-8601 UTC), dur_s (optional), attrs
// (optional object of scalars), source. Unknown fields are rejected.
Event event_from_json(const nlohmann::json& j);
nlohmann::json event_to_json(const Event& e);

}  // namespace ledgermine
