#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ledgermine {

// Stable error identifiers. The names returned by errc_name() are part of
// the CLI contract: validation failures print them verbatim.
enum class Errc {
  duplicate_id,
  unknown_event_type,
  malformed_event,
  parse_error,
  invalid_range,
  syntax_error,
  window_error,
  no_antecedent_events,
  degenerate_span,
  empty_ledger,
  no_treated_anchors,
  all_strata_too_small,
  exclusion_exhausted,
  degenerate_stratum,
  invalid_scenario,
  invalid_config,
  unknown_goal,
  invalid_graph,
  io_error,
};

constexpr std::string_view errc_name(Errc c) {
  switch (c) {
    case Errc::duplicate_id: return "DuplicateId";
    case Errc::unknown_event_type: return "UnknownEventType";
    case Errc::malformed_event: return "MalformedEvent";
    case Errc::parse_error: return "ParseError";
    case Errc::invalid_range: return "InvalidRange";
    case Errc::syntax_error: return "SyntaxError";
    case Errc::window_error: return "WindowError";
    case Errc::no_antecedent_events: return "NoAntecedentEvents";
    case Errc::degenerate_span: return "DegenerateSpan";
    case Errc::empty_ledger: return "EmptyLedger";
    case Errc::no_treated_anchors: return "NoTreatedAnchors";
    case Errc::all_strata_too_small: return "AllStrataTooSmall";
    case Errc::exclusion_exhausted: return "ExclusionExhausted";
    case Errc::degenerate_stratum: return "DegenerateStratum";
    case Errc::invalid_scenario: return "InvalidScenario";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::unknown_goal: return "UnknownGoal";
    case Errc::invalid_graph: return "InvalidGraph";
    case Errc::io_error: return "IoError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail),
        code_(code) {}

  Errc code() const noexcept { return code_; }
  std::string_view name() const noexcept { return errc_name(code_); }

 private:
  Errc code_;
};

}  // namespace ledgermine
