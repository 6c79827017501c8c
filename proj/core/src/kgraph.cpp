#include "ledgermine/kgraph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ledgermine/error.hpp"

namespace ledgermine {
namespace {

void validate_edge_shape(const CausalEdge& e, const Taxonomy& taxonomy) {
  if (!taxonomy.contains(e.source)) {
    throw Error(Errc::unknown_event_type, "edge source '" + e.source + "' not in taxonomy");
  }
  if (!taxonomy.contains(e.target)) {
    throw Error(Errc::unknown_event_type, "edge target '" + e.target + "' not in taxonomy");
  }
  if (e.window.lo_s < 0 || e.window.lo_s > e.window.hi_s) {
    throw Error(Errc::invalid_graph, "edge " + e.key().to_string() + " window violates 0 <= a <= b");
  }
  if (e.confidence < 0.0 || e.confidence > 1.0) {
    throw Error(Errc::invalid_graph, "edge " + e.key().to_string() + " confidence outside [0,1]");
  }
  if (e.weight < -1.0 || e.weight > 1.0) {
    throw Error(Errc::invalid_graph, "edge " + e.key().to_string() + " weight outside [-1,1]");
  }
  if (e.provenance != "mined" && e.provenance != "expert") {
    throw Error(Errc::invalid_graph,
                "edge " + e.key().to_string() + " provenance must be mined or expert");
  }
}

AuditEntry audit_of(const CausalEdge& e) {
  return {e.provenance, e.weight, e.confidence, e.updated_at};
}

nlohmann::json edge_to_json(const CausalEdge& e) {
  nlohmann::json j;
  j["source"] = e.source;
  j["target"] = e.target;
  j["window_s"] = {e.window.lo_s, e.window.hi_s};
  j["weight"] = e.weight;
  j["confidence"] = e.confidence;
  j["provenance"] = e.provenance;
  j["updated_at"] = format_instant(e.updated_at);
  if (e.evidence) {
    j["evidence"] = {{"pooled_effect", e.evidence->pooled_effect},
                     {"p_value", e.evidence->p_value},
                     {"n_strata", e.evidence->n_strata},
                     {"permutations", e.evidence->permutations},
                     {"seed", e.evidence->seed}};
  }
  j["audit"] = nlohmann::json::array();
  for (const auto& a : e.audit) {
    j["audit"].push_back({{"provenance", a.provenance},
                          {"weight", a.weight},
                          {"confidence", a.confidence},
                          {"updated_at", format_instant(a.updated_at)}});
  }
  return j;
}

Instant instant_field(const nlohmann::json& j, const char* field) {
  const auto t = parse_instant(j.at(field).get<std::string>());
  if (!t) {
    throw Error(Errc::parse_error, std::string(field) + " is not ISO-8601 UTC");
  }
  return *t;
}

CausalEdge edge_from_json(const nlohmann::json& j) {
  CausalEdge e;
  e.source = j.at("source").get<std::string>();
  e.target = j.at("target").get<std::string>();
  const auto& w = j.at("window_s");
  if (!w.is_array() || w.size() != 2) {
    throw Error(Errc::parse_error, "edge window_s must be a [lo,hi] pair of seconds");
  }
  e.window = {w[0].get<std::int64_t>(), w[1].get<std::int64_t>()};
  e.weight = j.at("weight").get<double>();
  e.confidence = j.at("confidence").get<double>();
  e.provenance = j.at("provenance").get<std::string>();
  e.updated_at = instant_field(j, "updated_at");
  if (j.contains("evidence")) {
    const auto& ev = j["evidence"];
    EvidenceSummary s;
    s.pooled_effect = ev.at("pooled_effect").get<double>();
    s.p_value = ev.at("p_value").get<double>();
    s.n_strata = ev.value("n_strata", std::int64_t{0});
    s.permutations = ev.value("permutations", std::int64_t{0});
    s.seed = ev.value("seed", std::uint64_t{0});
    e.evidence = s;
  }
  for (const auto& a : j.value("audit", nlohmann::json::array())) {
    e.audit.push_back({a.at("provenance").get<std::string>(), a.at("weight").get<double>(),
                       a.at("confidence").get<double>(), instant_field(a, "updated_at")});
  }
  return e;
}

}  // namespace

std::string EdgeKey::to_string() const {
  return source + "->" + target + "@[" + std::to_string(window.lo_s) + "," +
         std::to_string(window.hi_s) + "]";
}

void KnowledgeGraph::upsert(CausalEdge edge, const Taxonomy& taxonomy) {
  validate_edge_shape(edge, taxonomy);
  const EdgeKey key = edge.key();
  auto it = edges_.find(key);
  if (it == edges_.end()) {
    edge.audit = {audit_of(edge)};
    nodes_.insert(edge.source);
    nodes_.insert(edge.target);
    edges_.emplace(key, std::move(edge));
    return;
  }
  CausalEdge& stored = it->second;
  std::vector<AuditEntry> audit = std::move(stored.audit);
  audit.push_back(audit_of(edge));
  const bool incoming_wins =
      edge.confidence > stored.confidence ||
      (edge.confidence == stored.confidence && edge.updated_at > stored.updated_at);
  if (incoming_wins) {
    stored = std::move(edge);
  }
  stored.audit = std::move(audit);
}

void KnowledgeGraph::seed_expert_rules(const std::filesystem::path& path,
                                       const Taxonomy& taxonomy) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open rules file " + path.string());
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::parse_error,
                  "rules line " + std::to_string(line_number) + ": " + e.what());
    }
    try {
      CausalEdge e;
      e.source = j.at("source").get<std::string>();
      e.target = j.at("target").get<std::string>();
      const auto& w = j.at("window_h");
      if (!w.is_array() || w.size() != 2) {
        throw Error(Errc::parse_error, "window_h must be a [lo,hi] pair of hours");
      }
      e.window = {static_cast<std::int64_t>(std::llround(w[0].get<double>() * kSecondsPerHour)),
                  static_cast<std::int64_t>(std::llround(w[1].get<double>() * kSecondsPerHour))};
      e.weight = j.at("weight").get<double>();
      e.confidence = j.at("confidence").get<double>();
      e.provenance = "expert";
      e.updated_at = 0;
      upsert(std::move(e), taxonomy);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::parse_error,
                  "rules line " + std::to_string(line_number) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), "rules line " + std::to_string(line_number) + ": " + e.what());
    }
  }
}

std::vector<CausalEdge> KnowledgeGraph::query(const EdgeFilter& filter,
                                              const Taxonomy& taxonomy) const {
  std::vector<CausalEdge> out;
  for (const auto& [key, e] : edges_) {
    if (filter.source && !taxonomy.type_matches(e.source, *filter.source)) continue;
    if (filter.target && !taxonomy.type_matches(e.target, *filter.target)) continue;
    if (filter.min_confidence && e.confidence < *filter.min_confidence) continue;
    if (filter.provenance && e.provenance != *filter.provenance) continue;
    out.push_back(e);
  }
  std::sort(out.begin(), out.end(), [](const CausalEdge& a, const CausalEdge& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.key() < b.key();
  });
  return out;
}

void KnowledgeGraph::save(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["taxonomy_id"] = taxonomy_id_;
  j["nodes"] = nodes_;
  j["edges"] = nlohmann::json::array();
  for (const auto& [key, e] : edges_) {
    j["edges"].push_back(edge_to_json(e));
  }
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot write graph file " + path.string());
  out << j.dump(2) << "\n";
}

KnowledgeGraph KnowledgeGraph::load(const std::filesystem::path& path,
                                    const Taxonomy& taxonomy) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open graph file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, "graph file " + path.string() + ": " + e.what());
  }
  KnowledgeGraph g;
  try {
    g.taxonomy_id_ = j.value("taxonomy_id", std::string{});
    for (const auto& n : j.value("nodes", nlohmann::json::array())) {
      const auto node = n.get<std::string>();
      if (!taxonomy.contains(node)) {
        throw Error(Errc::invalid_graph, "graph node '" + node + "' not in taxonomy");
      }
      g.nodes_.insert(node);
    }
    for (const auto& je : j.value("edges", nlohmann::json::array())) {
      CausalEdge e = edge_from_json(je);
      validate_edge_shape(e, taxonomy);
      if (!g.nodes_.count(e.source) || !g.nodes_.count(e.target)) {
        throw Error(Errc::invalid_graph,
                    "edge " + e.key().to_string() + " references a non-node endpoint");
      }
      const EdgeKey key = e.key();
      if (!g.edges_.emplace(key, std::move(e)).second) {
        throw Error(Errc::invalid_graph, "duplicate edge key " + key.to_string());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, "graph file " + path.string() + ": " + e.what());
  }
  return g;
}

std::string KnowledgeGraph::to_dot() const {
  std::ostringstream out;
  out << "digraph ledgermine {\n";
  for (const auto& n : nodes_) {
    out << "  \"" << n << "\";\n";
  }
  for (const auto& [key, e] : edges_) {
    char label[96];
    std::snprintf(label, sizeof(label), "w=%.6g c=%.6g", e.weight, e.confidence);
    out << "  \"" << e.source << "\" -> \"" << e.target << "\" [label=\"" << label << " ["
        << format_hours(e.window.lo_s) << "," << format_hours(e.window.hi_s) << "]h\"];\n";
  }
  out << "}\n";
  return out.str();
}

void KnowledgeGraph::export_dot(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot write DOT file " + path.string());
  out << to_dot();
}

}  // namespace ledgermine
