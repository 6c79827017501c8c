#include "ledgermine/causal.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ledgermine/error.hpp"
#include "ledgermine/rng.hpp"

namespace ledgermine {

void CausalConfig::validate() const {
  if (permutations < 1) throw Error(Errc::invalid_config, "permutations must be >= 1");
  if (alpha <= 0.0 || alpha >= 1.0) throw Error(Errc::invalid_config, "alpha must be in (0,1)");
  if (control_ratio <= 0.0) throw Error(Errc::invalid_config, "control_ratio must be > 0");
  if (min_stratum_size < 1) throw Error(Errc::invalid_config, "min_stratum_size must be >= 1");
  if (lookback_h <= 0.0) throw Error(Errc::invalid_config, "lookback_h must be > 0");
}

CausalConfig CausalConfig::from_json(const nlohmann::json& j) {
  CausalConfig c;
  if (!j.is_object()) throw Error(Errc::invalid_config, "causal config must be a JSON object");
  c.permutations = j.value("permutations", c.permutations);
  c.alpha = j.value("alpha", c.alpha);
  c.control_ratio = j.value("control_ratio", c.control_ratio);
  c.min_stratum_size = j.value("min_stratum_size", c.min_stratum_size);
  c.lookback_h = j.value("lookback_h", c.lookback_h);
  if (j.contains("confounders")) {
    c.confounders = j["confounders"].get<std::vector<std::string>>();
  }
  c.validate();
  return c;
}

namespace {

std::string scalar_to_band(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Precomputed lookup for one confounder key. Derived keys are functions of
// the anchor time alone; recent:<type> tracks the latest event of a type;
// plain attribute keys carry the value forward from the latest event that
// has the attribute, so control anchors (which have no event of their own)
// stratify the same way treated anchors do.
struct ConfounderSeries {
  enum class Kind { day_of_week, hour_band, recent_type, attribute } kind;
  std::string key;
  std::vector<Instant> times;               // recent_type
  std::vector<std::pair<Instant, std::string>> values;  // attribute, ledger order
};

std::string stratum_component(const ConfounderSeries& series, Instant anchor,
                              std::int64_t lookback_s) {
  switch (series.kind) {
    case ConfounderSeries::Kind::day_of_week:
      return "dow=" + std::to_string(day_of_week(anchor));
    case ConfounderSeries::Kind::hour_band:
      return "band=" + std::to_string(hour_band(anchor));
    case ConfounderSeries::Kind::recent_type: {
      auto it = std::upper_bound(series.times.begin(), series.times.end(), anchor);
      std::string band = "none";
      if (it != series.times.begin()) {
        const std::int64_t gap = anchor - *std::prev(it);
        if (gap <= lookback_s) band = std::to_string(gap / kSecondsPerHour);
      }
      return series.key + "=" + band;
    }
    case ConfounderSeries::Kind::attribute: {
      auto it = std::upper_bound(
          series.values.begin(), series.values.end(), anchor,
          [](Instant t, const auto& v) { return t < v.first; });
      std::string band;
      if (it != series.values.begin()) {
        const auto& [t, value] = *std::prev(it);
        if (anchor - t <= lookback_s) band = value;
      }
      return series.key + "=" + band;
    }
  }
  return series.key + "=";
}

std::vector<Instant> times_matching(const Ledger& ledger, const std::string& type,
                                    const Taxonomy& taxonomy) {
  std::vector<Instant> out;
  for (const Event& e : ledger) {
    if (taxonomy.type_matches(e.type, type)) out.push_back(e.timestamp);
  }
  return out;
}

bool any_in_window(const std::vector<Instant>& times, Instant lo, Instant hi) {
  const auto it = std::lower_bound(times.begin(), times.end(), lo);
  return it != times.end() && *it <= hi;
}

// Merged exclusion intervals [t-hi, t+hi] around every antecedent event.
std::vector<std::pair<Instant, Instant>> exclusion_zones(const std::vector<Instant>& times,
                                                         std::int64_t radius) {
  std::vector<std::pair<Instant, Instant>> zones;
  for (const Instant t : times) {
    const Instant lo = t - radius;
    const Instant hi = t + radius;
    if (!zones.empty() && lo <= zones.back().second) {
      zones.back().second = std::max(zones.back().second, hi);
    } else {
      zones.emplace_back(lo, hi);
    }
  }
  return zones;
}

bool in_zones(const std::vector<std::pair<Instant, Instant>>& zones, Instant t) {
  auto it = std::upper_bound(zones.begin(), zones.end(), t,
                             [](Instant x, const auto& z) { return x < z.first; });
  if (it == zones.begin()) return false;
  return t <= std::prev(it)->second;
}

double stratum_rd(const StratumAnchors& s) {
  const auto positives = [](const std::vector<AnchorSample>& v) {
    std::int64_t n = 0;
    for (const auto& a : v) n += a.outcome ? 1 : 0;
    return n;
  };
  const double pt = static_cast<double>(positives(s.treated)) /
                    static_cast<double>(s.treated.size());
  const double pc = static_cast<double>(positives(s.control)) /
                    static_cast<double>(s.control.size());
  return pt - pc;
}

}  // namespace

FairDataset build_fair_dataset(const Ledger& ledger, const Hypothesis& hypothesis,
                               const std::vector<std::string>& confounders,
                               const CausalConfig& config, std::uint64_t seed) {
  config.validate();
  if (hypothesis.window.lo_s < 0 || hypothesis.window.lo_s > hypothesis.window.hi_s) {
    throw Error(Errc::window_error, "hypothesis window violates 0 <= a <= b");
  }
  if (ledger.empty()) throw Error(Errc::empty_ledger, "cannot test against an empty ledger");

  // The taxonomy is implicit in the ledger here: anchor construction only
  // needs exact event types plus the pattern's atoms, all of which must
  // already exist in the ledger's taxonomy. Build a local view.
  Taxonomy view;
  for (const Event& e : ledger) view.add_type(e.type);
  const Pattern antecedent = parse_pattern(hypothesis.antecedent);
  for (const auto& path : antecedent.atom_paths()) view.add_type(path);
  view.add_type(hypothesis.outcome);

  const auto occurrences = match_pattern(ledger.events(), antecedent, view);
  if (occurrences.empty()) {
    throw Error(Errc::no_treated_anchors, "antecedent '" + hypothesis.antecedent +
                                              "' never occurs in the ledger");
  }

  const auto outcome_times = times_matching(ledger, hypothesis.outcome, view);
  const std::vector<Instant> antecedent_event_times = [&] {
    std::vector<Instant> ts;
    for (const Event& e : ledger) {
      for (const auto& path : antecedent.atom_paths()) {
        if (view.type_matches(e.type, path)) {
          ts.push_back(e.timestamp);
          break;
        }
      }
    }
    return ts;
  }();

  // One precomputed series per confounder key.
  const std::int64_t lookback_s =
      static_cast<std::int64_t>(std::llround(config.lookback_h * kSecondsPerHour));
  std::vector<ConfounderSeries> series;
  for (const auto& key : confounders) {
    ConfounderSeries s;
    s.key = key;
    if (key == "day_of_week") {
      s.kind = ConfounderSeries::Kind::day_of_week;
    } else if (key == "hour_band") {
      s.kind = ConfounderSeries::Kind::hour_band;
    } else if (key.rfind("recent:", 0) == 0) {
      s.kind = ConfounderSeries::Kind::recent_type;
      const std::string type = key.substr(7);
      if (!view.contains(type)) {
        throw Error(Errc::unknown_event_type,
                    "confounder '" + key + "' names a type absent from the ledger");
      }
      s.times = times_matching(ledger, type, view);
    } else {
      s.kind = ConfounderSeries::Kind::attribute;
      for (const Event& e : ledger) {
        if (e.attributes.contains(key)) {
          s.values.emplace_back(e.timestamp, scalar_to_band(e.attributes.at(key)));
        }
      }
    }
    series.push_back(std::move(s));
  }

  const auto stratum_key = [&](Instant anchor) {
    if (series.empty()) return std::string("all");
    std::string key;
    for (const auto& s : series) {
      if (!key.empty()) key += "|";
      key += stratum_component(s, anchor, lookback_s);
    }
    return key;
  };

  FairDataset ds;
  ds.hypothesis = hypothesis;
  ds.confounders = confounders;
  ds.seed = seed;

  std::map<std::string, StratumAnchors> strata;
  for (const auto& occ : occurrences) {
    AnchorSample a;
    a.time = occ.anchor_time;
    a.outcome = any_in_window(outcome_times, occ.anchor_time + hypothesis.window.lo_s,
                              occ.anchor_time + hypothesis.window.hi_s);
    strata[stratum_key(occ.anchor_time)].treated.push_back(a);
  }

  // Control anchors: uniform over the span, outside every exclusion zone,
  // quota-matched to the treated strata.
  const auto [span_lo, span_hi] = ledger.span();
  const auto zones = exclusion_zones(antecedent_event_times, hypothesis.window.hi_s);
  std::map<std::string, std::int64_t> quota;
  std::int64_t total_quota = 0;
  for (const auto& [key, s] : strata) {
    const auto q = static_cast<std::int64_t>(
        std::llround(config.control_ratio * static_cast<double>(s.treated.size())));
    quota[key] = q;
    total_quota += q;
  }

  // Controls also keep a minimum spacing wider than the outcome window,
  // so no two of them can be satisfied by the same outcome event. Without
  // this, clustered controls share outcome draws and the permutation null
  // (which treats anchors as exchangeable) becomes anti-conservative.
  const std::int64_t separation = hypothesis.window.hi_s - hypothesis.window.lo_s + 1;
  std::set<Instant> accepted_times;
  const auto too_close = [&](Instant t) {
    auto it = accepted_times.lower_bound(t - separation + 1);
    return it != accepted_times.end() && *it <= t + separation - 1;
  };

  Rng rng(substream_seed(seed, "controls"));
  const std::int64_t budget = std::max<std::int64_t>(100000, 200 * total_quota);
  std::int64_t accepted = 0;
  std::int64_t remaining = total_quota;
  for (std::int64_t attempt = 0; attempt < budget && remaining > 0; ++attempt) {
    const Instant t = rng.uniform_int(span_lo, span_hi);
    if (in_zones(zones, t)) continue;
    if (too_close(t)) continue;
    const std::string key = stratum_key(t);
    const auto it = quota.find(key);
    if (it == quota.end() || it->second == 0) continue;
    --it->second;
    --remaining;
    ++accepted;
    accepted_times.insert(t);
    AnchorSample a;
    a.time = t;
    a.outcome = any_in_window(outcome_times, t + hypothesis.window.lo_s,
                              t + hypothesis.window.hi_s);
    strata[key].control.push_back(a);
  }
  if (accepted == 0 && total_quota > 0) {
    throw Error(Errc::exclusion_exhausted,
                "could not sample any control anchor outside the exclusion zones");
  }

  for (auto& [key, s] : strata) {
    const auto nt = static_cast<std::int64_t>(s.treated.size());
    const auto nc = static_cast<std::int64_t>(s.control.size());
    if (nt >= config.min_stratum_size && nc >= config.min_stratum_size) {
      ds.strata.emplace(key, std::move(s));
    } else {
      ds.warnings.push_back("dropped stratum '" + key + "' (treated=" + std::to_string(nt) +
                            ", control=" + std::to_string(nc) + ")");
    }
  }
  if (ds.strata.empty()) {
    throw Error(Errc::all_strata_too_small,
                "no stratum kept >= " + std::to_string(config.min_stratum_size) +
                    " anchors on both sides");
  }
  return ds;
}

CausalResult test_hypothesis(const FairDataset& dataset, std::int64_t permutations,
                             std::uint64_t seed) {
  if (permutations < 1) throw Error(Errc::invalid_config, "permutations must be >= 1");
  if (dataset.strata.empty()) {
    throw Error(Errc::degenerate_stratum, "dataset has no strata");
  }

  CausalResult result;
  result.permutations = permutations;
  result.seed = seed;
  result.n_strata = static_cast<std::int64_t>(dataset.strata.size());

  struct Flat {
    std::vector<std::uint8_t> outcomes;  // treated block then control block
    std::int64_t n_t = 0;
    std::int64_t n_c = 0;
    std::int64_t total_pos = 0;
    double weight = 0.0;
  };
  std::vector<Flat> flats;
  double weight_sum = 0.0;
  double pooled_obs = 0.0;
  for (const auto& [key, s] : dataset.strata) {
    if (s.treated.empty() || s.control.empty()) {
      throw Error(Errc::degenerate_stratum, "stratum '" + key + "' lacks anchors on one side");
    }
    Flat f;
    f.n_t = static_cast<std::int64_t>(s.treated.size());
    f.n_c = static_cast<std::int64_t>(s.control.size());
    f.outcomes.reserve(s.treated.size() + s.control.size());
    for (const auto& a : s.treated) f.outcomes.push_back(a.outcome ? 1 : 0);
    for (const auto& a : s.control) f.outcomes.push_back(a.outcome ? 1 : 0);
    for (const auto v : f.outcomes) f.total_pos += v;
    f.weight = static_cast<double>(f.n_t) * static_cast<double>(f.n_c) /
               static_cast<double>(f.n_t + f.n_c);
    const double rd = stratum_rd(s);
    result.per_stratum.push_back({key, rd, f.n_t, f.n_c});
    pooled_obs += f.weight * rd;
    weight_sum += f.weight;
    flats.push_back(std::move(f));
  }
  pooled_obs /= weight_sum;
  result.pooled_effect = pooled_obs;

  // Within-stratum label permutation: draw n_t of the stratum's outcomes
  // without replacement (partial Fisher-Yates) and recompute the pooled
  // effect. Each replicate seeds its own substream, so evaluation order
  // cannot change the count.
  std::int64_t at_least_as_extreme = 0;
  const double threshold = std::abs(pooled_obs);
  std::vector<std::uint8_t> scratch;
  for (std::int64_t b = 0; b < permutations; ++b) {
    Rng rng(substream_seed(seed, "permutation", static_cast<std::uint64_t>(b)));
    double pooled_perm = 0.0;
    for (const Flat& f : flats) {
      scratch = f.outcomes;
      const std::int64_t n = f.n_t + f.n_c;
      std::int64_t treated_pos = 0;
      for (std::int64_t i = 0; i < f.n_t; ++i) {
        const std::int64_t j = rng.uniform_int(i, n - 1);
        std::swap(scratch[static_cast<std::size_t>(i)], scratch[static_cast<std::size_t>(j)]);
        treated_pos += scratch[static_cast<std::size_t>(i)];
      }
      const double pt = static_cast<double>(treated_pos) / static_cast<double>(f.n_t);
      const double pc = static_cast<double>(f.total_pos - treated_pos) /
                        static_cast<double>(f.n_c);
      pooled_perm += f.weight * (pt - pc);
    }
    pooled_perm /= weight_sum;
    if (std::abs(pooled_perm) >= threshold) ++at_least_as_extreme;
  }
  result.p_value = static_cast<double>(1 + at_least_as_extreme) /
                   static_cast<double>(permutations + 1);
  return result;
}

CausalResult evaluate(const Ledger& ledger, const Hypothesis& hypothesis,
                      const std::vector<std::string>& confounders,
                      const CausalConfig& config, std::uint64_t seed) {
  const FairDataset ds = build_fair_dataset(ledger, hypothesis, confounders, config, seed);
  return test_hypothesis(ds, config.permutations, seed);
}

nlohmann::json CausalResult::to_json() const {
  nlohmann::json j;
  j["pooled_effect"] = pooled_effect;
  j["p_value"] = p_value;
  j["n_strata"] = n_strata;
  j["permutations"] = permutations;
  j["seed"] = seed;
  j["per_stratum"] = nlohmann::json::array();
  for (const auto& s : per_stratum) {
    j["per_stratum"].push_back({{"key", s.key},
                                {"risk_difference", s.risk_difference},
                                {"n_treated", s.n_treated},
                                {"n_control", s.n_control}});
  }
  return j;
}

}  // namespace ledgermine
