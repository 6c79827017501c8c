#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ledgermine/ledger.hpp"
#include "ledgermine/pattern.hpp"
#include "ledgermine/taxonomy.hpp"

namespace ledgermine {

struct BackgroundSpec {
  std::string type;
  double rate_per_day = 0.0;
};

// With probability prob, each cause event plants an effect event at
// cause_time + Uniform[window.lo, window.hi].
struct PlantedRule {
  std::string cause;
  std::string effect;
  double prob = 0.0;
  Window window;
};

struct ConfounderTarget {
  std::string type;
  double prob = 0.0;
};

// Driver events occur as their own Poisson process and emit each target
// independently with the stated probability at a short uniform latency,
// creating association without causation between sibling targets.
struct PlantedConfounder {
  std::string driver;
  double rate_per_day = 0.0;
  double latency_h = 1.0;
  std::vector<ConfounderTarget> targets;
};

struct Scenario {
  std::int64_t span_days = 1;
  Instant start = 1514764800;  // 2018-01-01T00:00:00Z
  std::vector<BackgroundSpec> background;
  std::vector<PlantedRule> rules;
  std::vector<PlantedConfounder> confounders;
  std::uint64_t seed = 0;

  void validate() const;  // throws InvalidScenario
  nlohmann::json to_json() const;
  static Scenario from_json(const nlohmann::json& j);
  static Scenario load(const std::filesystem::path& path);
};

struct TrueEdge {
  std::string cause;
  std::string effect;
  Window window;
  double prob = 0.0;
  std::string origin;  // "rule:<i>" or "confounder:<i>"
};

struct SpuriousPair {
  std::string a;
  std::string b;
  std::string driver;
};

struct GroundTruth {
  std::vector<TrueEdge> true_edges;
  std::vector<SpuriousPair> spurious_pairs;

  nlohmann::json to_json() const;
};

struct SynthOutput {
  Ledger ledger;
  GroundTruth truth;
  Taxonomy taxonomy;  // every type the scenario mentions
};

// Fully deterministic for a given scenario (including its seed). Planted
// events carry attributes `synth_origin` and `synth_cause` naming the rule
// and the causing event id; the mining/causal paths never read them.
SynthOutput generate(const Scenario& scenario);

}  // namespace ledgermine
