#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ledgermine/event.hpp"
#include "ledgermine/kgraph.hpp"
#include "ledgermine/taxonomy.hpp"
#include "ledgermine/time.hpp"

namespace ledgermine {

struct GuidanceContext {
  Instant now = 0;
  std::vector<Event> recent;  // sorted ascending
  nlohmann::json attributes = nlohmann::json::object();
  std::string goal;

  static GuidanceContext from_json(const nlohmann::json& j);
};

struct Recommendation {
  std::string action;  // actionable type path
  Window window;
  double score = 0.0;  // weight * confidence
  std::optional<std::string> channel;
  std::string rationale;  // source edge key

  nlohmann::json to_json() const;
};

// Candidate edges point at the goal (descendant matching) with confidence
// >= min_confidence and an actionable source. An edge whose action
// already occurred within its own window before now is excluded: the
// antecedent is satisfied, there is nothing to nudge. Ranked by score
// desc, then confidence desc, action asc. Throws UnknownGoal.
std::vector<Recommendation> recommend(const KnowledgeGraph& graph,
                                      const GuidanceContext& context,
                                      const Taxonomy& taxonomy, double min_confidence);

// The medium with the most confident edge medium -> action (or toward an
// ancestor of the action); defaults[0] when no such edge exists yet
// (cold start). Ties break to the lexicographically smaller media path.
std::string select_medium(const KnowledgeGraph& graph, const std::string& action,
                          const Taxonomy& taxonomy,
                          const std::vector<std::string>& defaults);

}  // namespace ledgermine
