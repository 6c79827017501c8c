#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ledgermine/causal.hpp"
#include "ledgermine/pattern.hpp"
#include "ledgermine/taxonomy.hpp"
#include "ledgermine/time.hpp"

namespace ledgermine {

// Edges are keyed by (source, target, window): the same type pair may
// carry several windows because they are distinct mechanisms.
struct EdgeKey {
  std::string source;
  std::string target;
  Window window;

  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
  std::string to_string() const;
};

struct AuditEntry {
  std::string provenance;  // "mined" | "expert"
  double weight = 0.0;
  double confidence = 0.0;
  Instant updated_at = 0;
};

struct EvidenceSummary {
  double pooled_effect = 0.0;
  double p_value = 1.0;
  std::int64_t n_strata = 0;
  std::int64_t permutations = 0;
  std::uint64_t seed = 0;
};

// weight = tested risk difference, confidence = 1 - p_value.
struct CausalEdge {
  std::string source;
  std::string target;
  Window window;
  double weight = 0.0;
  double confidence = 0.0;
  std::string provenance;
  std::optional<EvidenceSummary> evidence;
  Instant updated_at = 0;
  std::vector<AuditEntry> audit;  // every record ever upserted at this key

  EdgeKey key() const { return {source, target, window}; }
};

struct EdgeFilter {
  std::optional<std::string> source;
  std::optional<std::string> target;
  std::optional<double> min_confidence;
  std::optional<std::string> provenance;
};

// Single-writer, multi-reader store of tested relationships. Conflicts at
// one key resolve to the record with the higher confidence (ties: newer
// updated_at, then the incumbent), with the losing record kept in the
// audit list.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  explicit KnowledgeGraph(const Taxonomy& taxonomy) : taxonomy_id_(taxonomy.fingerprint()) {}

  void upsert(CausalEdge edge, const Taxonomy& taxonomy);

  // JSON Lines, fields: source, target, window_h ([a,b]), weight,
  // confidence. Every rule becomes an expert edge.
  void seed_expert_rules(const std::filesystem::path& path, const Taxonomy& taxonomy);

  // Filters combine with AND; source/target match descendants of the
  // filter path. Sorted by confidence desc, weight desc, key asc.
  std::vector<CausalEdge> query(const EdgeFilter& filter, const Taxonomy& taxonomy) const;

  void save(const std::filesystem::path& path) const;
  static KnowledgeGraph load(const std::filesystem::path& path, const Taxonomy& taxonomy);

  std::string to_dot() const;
  void export_dot(const std::filesystem::path& path) const;

  const std::set<std::string>& nodes() const { return nodes_; }
  const std::map<EdgeKey, CausalEdge>& edges() const { return edges_; }
  const std::string& taxonomy_id() const { return taxonomy_id_; }
  std::size_t edge_count() const { return edges_.size(); }

 private:
  std::string taxonomy_id_;
  std::set<std::string> nodes_;
  std::map<EdgeKey, CausalEdge> edges_;
};

}  // namespace ledgermine
