#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ledgermine/event.hpp"
#include "ledgermine/taxonomy.hpp"
#include "ledgermine/time.hpp"

namespace ledgermine {

// Append-only, time-ordered record of one user's events. A loaded ledger
// is an immutable snapshot; append extends a single writer's copy, and
// every consumer downstream reads snapshots only. Iteration order is
// total and deterministic: ascending (timestamp, id).
class Ledger {
 public:
  Ledger() = default;

  // Validates against the taxonomy, keeps sorted order.
  // Throws DuplicateId / UnknownEventType / MalformedEvent.
  void append(Event event, const Taxonomy& taxonomy);

  // Bulk construction; input order irrelevant to the result.
  static Ledger from_events(std::vector<Event> events, const Taxonomy& taxonomy);

  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }
  std::span<const Event> events() const { return events_; }

  // [min ts, max ts]; throws EmptyLedger when undefined.
  std::pair<Instant, Instant> span() const;
  std::int64_t span_seconds() const;

  // Events with from <= timestamp < to; the half-open interval partitions
  // the timeline. Throws InvalidRange if from > to.
  std::span<const Event> slice(Instant from, Instant to) const;

  auto begin() const { return events_.begin(); }
  auto end() const { return events_.end(); }

 private:
  std::vector<Event> events_;
  std::unordered_set<std::string> ids_;
};

struct SkippedLine {
  std::size_t line_number = 0;
  std::string reason;
};

enum class IngestMode {
  strict,   // any invalid line aborts the load
  lenient,  // invalid lines are skipped and reported
};

struct LoadResult {
  Ledger ledger;
  std::vector<SkippedLine> skipped;
};

// JSON Lines, one event per line. Errors carry the 1-based line number.
LoadResult load_ledger(const std::filesystem::path& path, const Taxonomy& taxonomy,
                       IngestMode mode = IngestMode::strict);

// Canonical JSONL; load_ledger(save_ledger(l)) reproduces l exactly.
void save_ledger(const Ledger& ledger, const std::filesystem::path& path);

}  // namespace ledgermine
