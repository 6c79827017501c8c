#include "ledgermine/ledger.hpp"

#include <algorithm>
#include <fstream>

#include "ledgermine/error.hpp"

namespace ledgermine {

void Ledger::append(Event event, const Taxonomy& taxonomy) {
  validate_event(event, taxonomy);
  if (ids_.count(event.id)) {
    throw Error(Errc::duplicate_id, "event id '" + event.id + "' already present");
  }
  const auto pos = std::upper_bound(events_.begin(), events_.end(), event, event_before);
  ids_.insert(event.id);
  events_.insert(pos, std::move(event));
}

Ledger Ledger::from_events(std::vector<Event> events, const Taxonomy& taxonomy) {
  Ledger ledger;
  for (auto& e : events) {
    validate_event(e, taxonomy);
    if (!ledger.ids_.insert(e.id).second) {
      throw Error(Errc::duplicate_id, "event id '" + e.id + "' already present");
    }
  }
  ledger.events_ = std::move(events);
  std::sort(ledger.events_.begin(), ledger.events_.end(), event_before);
  return ledger;
}

std::pair<Instant, Instant> Ledger::span() const {
  if (events_.empty()) {
    throw Error(Errc::empty_ledger, "span undefined for an empty ledger");
  }
  return {events_.front().timestamp, events_.back().timestamp};
}

std::int64_t Ledger::span_seconds() const {
  const auto [lo, hi] = span();
  return hi - lo;
}

std::span<const Event> Ledger::slice(Instant from, Instant to) const {
  if (from > to) {
    throw Error(Errc::invalid_range, "slice from > to");
  }
  const auto lo = std::lower_bound(events_.begin(), events_.end(), from,
                                   [](const Event& e, Instant t) { return e.timestamp < t; });
  const auto hi = std::lower_bound(lo, events_.end(), to,
                                   [](const Event& e, Instant t) { return e.timestamp < t; });
  return {lo, hi};
}

LoadResult load_ledger(const std::filesystem::path& path, const Taxonomy& taxonomy,
                       IngestMode mode) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::io_error, "cannot open ledger file " + path.string());
  }
  LoadResult result;
  std::vector<Event> events;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::parse_error, e.what());
      }
      Event event = event_from_json(j);
      validate_event(event, taxonomy);
      if (!ids.insert(event.id).second) {
        throw Error(Errc::duplicate_id, "event id '" + event.id + "' already present");
      }
      events.push_back(std::move(event));
    } catch (const Error& e) {
      if (mode == IngestMode::strict) {
        throw Error(e.code(), "line " + std::to_string(line_number) + ": " + e.what());
      }
      result.skipped.push_back({line_number, std::string(e.what())});
    }
  }
  result.ledger = Ledger::from_events(std::move(events), taxonomy);
  return result;
}

void save_ledger(const Ledger& ledger, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(Errc::io_error, "cannot write ledger file " + path.string());
  }
  for (const Event& e : ledger) {
    out << event_to_json(e).dump() << "\n";
  }
}

}  // namespace ledgermine
