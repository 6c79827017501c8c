#include "ledgermine/guidance.hpp"

#include <algorithm>

#include "ledgermine/error.hpp"

namespace ledgermine {

GuidanceContext GuidanceContext::from_json(const nlohmann::json& j) {
  GuidanceContext ctx;
  if (!j.is_object()) throw Error(Errc::parse_error, "context must be a JSON object");
  const auto now = parse_instant(j.at("now").get<std::string>());
  if (!now) throw Error(Errc::parse_error, "context 'now' must be ISO-8601 UTC");
  ctx.now = *now;
  ctx.goal = j.at("goal").get<std::string>();
  for (const auto& je : j.value("recent", nlohmann::json::array())) {
    ctx.recent.push_back(event_from_json(je));
  }
  if (!std::is_sorted(ctx.recent.begin(), ctx.recent.end(), event_before)) {
    throw Error(Errc::malformed_event, "context 'recent' must be sorted ascending");
  }
  ctx.attributes = j.value("attributes", nlohmann::json::object());
  return ctx;
}

nlohmann::json Recommendation::to_json() const {
  nlohmann::json j;
  j["action"] = action;
  j["window_s"] = {window.lo_s, window.hi_s};
  j["score"] = score;
  if (channel) {
    j["channel"] = *channel;
  } else {
    j["channel"] = nullptr;
  }
  j["rationale"] = rationale;
  return j;
}

namespace {

// Best media source pointing at the action or one of its ancestors;
// nullopt when no media edge exists.
std::optional<std::string> best_medium(const KnowledgeGraph& graph, const std::string& action,
                                       const Taxonomy& taxonomy) {
  std::optional<std::string> best;
  double best_confidence = -1.0;
  for (const auto& [key, e] : graph.edges()) {
    if (!taxonomy.is_media(e.source)) continue;
    if (!taxonomy.contains(e.target) || !taxonomy.type_matches(action, e.target)) continue;
    if (e.confidence > best_confidence ||
        (e.confidence == best_confidence && best && e.source < *best)) {
      best = e.source;
      best_confidence = e.confidence;
    }
  }
  return best;
}

}  // namespace

std::vector<Recommendation> recommend(const KnowledgeGraph& graph,
                                      const GuidanceContext& context,
                                      const Taxonomy& taxonomy, double min_confidence) {
  if (!taxonomy.contains(context.goal)) {
    throw Error(Errc::unknown_goal, "goal '" + context.goal + "' not in taxonomy");
  }

  EdgeFilter filter;
  filter.target = context.goal;
  filter.min_confidence = min_confidence;

  struct Candidate {
    Recommendation rec;
    double confidence;
  };
  std::vector<Candidate> candidates;
  for (const auto& e : graph.query(filter, taxonomy)) {
    if (!taxonomy.is_actionable(e.source)) continue;

    // Satisfied antecedent: the action happened recently enough that its
    // effect window still reaches past now.
    bool satisfied = false;
    for (const Event& ev : context.recent) {
      if (!taxonomy.contains(ev.type)) continue;
      if (!taxonomy.type_matches(ev.type, e.source)) continue;
      const std::int64_t gap = context.now - ev.timestamp;
      if (gap >= 0 && gap <= e.window.hi_s) {
        satisfied = true;
        break;
      }
    }
    if (satisfied) continue;

    Recommendation r;
    r.action = e.source;
    r.window = e.window;
    r.score = e.weight * e.confidence;
    r.channel = best_medium(graph, e.source, taxonomy);
    r.rationale = e.key().to_string();
    candidates.push_back({std::move(r), e.confidence});
  }

  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.rec.score != b.rec.score) return a.rec.score > b.rec.score;
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.rec.action != b.rec.action) return a.rec.action < b.rec.action;
    return a.rec.rationale < b.rec.rationale;
  });
  std::vector<Recommendation> out;
  out.reserve(candidates.size());
  for (auto& c : candidates) out.push_back(std::move(c.rec));
  return out;
}

std::string select_medium(const KnowledgeGraph& graph, const std::string& action,
                          const Taxonomy& taxonomy,
                          const std::vector<std::string>& defaults) {
  if (defaults.empty()) {
    throw Error(Errc::invalid_config, "media defaults must be nonempty");
  }
  for (const auto& d : defaults) {
    if (!taxonomy.is_media(d)) {
      throw Error(Errc::invalid_config, "default medium '" + d + "' not in taxonomy media");
    }
  }
  const auto best = best_medium(graph, action, taxonomy);
  return best ? *best : defaults.front();
}

}  // namespace ledgermine
