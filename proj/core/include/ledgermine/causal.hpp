#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ledgermine/ledger.hpp"
#include "ledgermine/miner.hpp"

namespace ledgermine {

// Stratification keys:
//   "day_of_week"    -> 0..6 from the anchor time
//   "hour_band"      -> quarter-day band from the anchor time
//   "recent:<type>"  -> whole hours since the latest event of <type> within
//                       lookback_h before the anchor, or "none"; this is
//                       the key that dissolves driver-induced confounding
//   anything else    -> value of that attribute carried forward from the
//                       latest event bearing it within lookback_h, so
//                       control anchors (which have no event of their own)
//                       stratify the same way treated anchors do
struct CausalConfig {
  std::int64_t permutations = 1000;
  double alpha = 0.05;
  double control_ratio = 1.0;
  std::int64_t min_stratum_size = 5;
  std::vector<std::string> confounders;
  double lookback_h = 2.0;

  void validate() const;
  static CausalConfig from_json(const nlohmann::json& j);
};

struct AnchorSample {
  Instant time = 0;
  bool outcome = false;
};

struct StratumAnchors {
  std::vector<AnchorSample> treated;
  std::vector<AnchorSample> control;
};

// Treated anchors are antecedent occurrence times; control anchors are
// seeded uniform samples from the ledger span that keep a distance of at
// least the window's upper bound from every antecedent event, matched per
// stratum. outcome = at least one outcome-type event inside
// [anchor+a, anchor+b].
struct FairDataset {
  Hypothesis hypothesis;
  std::vector<std::string> confounders;
  std::map<std::string, StratumAnchors> strata;
  std::vector<std::string> warnings;  // dropped strata etc.
  std::uint64_t seed = 0;
};

struct StratumResult {
  std::string key;
  double risk_difference = 0.0;
  std::int64_t n_treated = 0;
  std::int64_t n_control = 0;
};

struct CausalResult {
  double pooled_effect = 0.0;  // risk difference in [-1, 1]
  double p_value = 1.0;
  std::int64_t n_strata = 0;
  std::vector<StratumResult> per_stratum;
  std::int64_t permutations = 0;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

FairDataset build_fair_dataset(const Ledger& ledger, const Hypothesis& hypothesis,
                               const std::vector<std::string>& confounders,
                               const CausalConfig& config, std::uint64_t seed);

// Per-stratum risk difference pooled with weights n_t*n_c/(n_t+n_c);
// significance from within-stratum label permutations with the add-one
// estimator, so p is never 0. Replicates draw from per-index substreams
// and may run in any order.
CausalResult test_hypothesis(const FairDataset& dataset, std::int64_t permutations,
                             std::uint64_t seed);

// build_fair_dataset then test_hypothesis; the CLI entry point.
CausalResult evaluate(const Ledger& ledger, const Hypothesis& hypothesis,
                      const std::vector<std::string>& confounders,
                      const CausalConfig& config, std::uint64_t seed);

}  // namespace ledgermine
