#include "ledgermine/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "ledgermine/error.hpp"
#include "ledgermine/rng.hpp"

namespace ledgermine {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::invalid_scenario, what);
}

std::string seq_id(const std::string& prefix, std::size_t n) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06zu", n);
  return prefix + "-" + buf;
}

Window window_from_json(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) {
    throw Error(Errc::invalid_scenario, what + " must be a [lo,hi] pair of hours");
  }
  const double lo_h = j[0].get<double>();
  const double hi_h = j[1].get<double>();
  return Window{static_cast<std::int64_t>(std::llround(lo_h * kSecondsPerHour)),
                static_cast<std::int64_t>(std::llround(hi_h * kSecondsPerHour))};
}

// Homogeneous Poisson arrivals over [start, start + span_s), integer
// second resolution, via exponential gaps.
std::vector<Instant> poisson_times(Rng& rng, double rate_per_day, Instant start,
                                   std::int64_t span_s) {
  std::vector<Instant> out;
  if (rate_per_day <= 0.0) return out;
  const double rate_per_s = rate_per_day / static_cast<double>(kSecondsPerDay);
  double t = 0.0;
  for (;;) {
    t += rng.exponential(rate_per_s);
    if (t >= static_cast<double>(span_s)) break;
    out.push_back(start + static_cast<Instant>(t));
  }
  return out;
}

}  // namespace

void Scenario::validate() const {
  require(span_days >= 1, "span_days must be >= 1");
  for (const auto& b : background) {
    require(Taxonomy::valid_path(b.type), "background type '" + b.type + "' invalid");
    require(b.rate_per_day >= 0.0, "background rate must be >= 0");
  }
  for (const auto& r : rules) {
    require(Taxonomy::valid_path(r.cause), "rule cause '" + r.cause + "' invalid");
    require(Taxonomy::valid_path(r.effect), "rule effect '" + r.effect + "' invalid");
    require(r.prob >= 0.0 && r.prob <= 1.0, "rule prob must be in [0,1]");
    require(r.window.lo_s >= 0 && r.window.lo_s <= r.window.hi_s,
            "rule window violates 0 <= a <= b");
  }
  for (const auto& c : confounders) {
    require(Taxonomy::valid_path(c.driver), "confounder driver '" + c.driver + "' invalid");
    require(c.rate_per_day >= 0.0, "confounder rate must be >= 0");
    require(c.latency_h >= 0.0, "confounder latency must be >= 0");
    for (const auto& t : c.targets) {
      require(Taxonomy::valid_path(t.type), "confounder target '" + t.type + "' invalid");
      require(t.prob >= 0.0 && t.prob <= 1.0, "confounder target prob must be in [0,1]");
    }
  }
}

Scenario Scenario::from_json(const nlohmann::json& j) {
  Scenario sc;
  if (!j.is_object()) throw Error(Errc::invalid_scenario, "scenario must be a JSON object");
  sc.span_days = j.value("span_days", std::int64_t{1});
  if (j.contains("start")) {
    const auto t = parse_instant(j["start"].get<std::string>());
    require(t.has_value(), "scenario start must be ISO-8601 UTC");
    sc.start = *t;
  }
  sc.seed = j.value("seed", std::uint64_t{0});
  for (const auto& b : j.value("background", nlohmann::json::array())) {
    sc.background.push_back({b.at("type").get<std::string>(),
                             b.at("rate_per_day").get<double>()});
  }
  for (const auto& r : j.value("rules", nlohmann::json::array())) {
    PlantedRule rule;
    rule.cause = r.at("cause").get<std::string>();
    rule.effect = r.at("effect").get<std::string>();
    rule.prob = r.at("prob").get<double>();
    rule.window = window_from_json(r.at("window_h"), "rule window_h");
    sc.rules.push_back(std::move(rule));
  }
  for (const auto& c : j.value("confounders", nlohmann::json::array())) {
    PlantedConfounder conf;
    conf.driver = c.at("driver").get<std::string>();
    conf.rate_per_day = c.at("rate_per_day").get<double>();
    conf.latency_h = c.value("latency_h", 1.0);
    for (const auto& t : c.at("targets")) {
      conf.targets.push_back({t.at("type").get<std::string>(), t.at("prob").get<double>()});
    }
    sc.confounders.push_back(std::move(conf));
  }
  sc.validate();
  return sc;
}

nlohmann::json Scenario::to_json() const {
  nlohmann::json j;
  j["span_days"] = span_days;
  j["start"] = format_instant(start);
  j["seed"] = seed;
  j["background"] = nlohmann::json::array();
  for (const auto& b : background) {
    j["background"].push_back({{"type", b.type}, {"rate_per_day", b.rate_per_day}});
  }
  j["rules"] = nlohmann::json::array();
  for (const auto& r : rules) {
    j["rules"].push_back(
        {{"cause", r.cause},
         {"effect", r.effect},
         {"prob", r.prob},
         {"window_h",
          {static_cast<double>(r.window.lo_s) / kSecondsPerHour,
           static_cast<double>(r.window.hi_s) / kSecondsPerHour}}});
  }
  j["confounders"] = nlohmann::json::array();
  for (const auto& c : confounders) {
    nlohmann::json targets = nlohmann::json::array();
    for (const auto& t : c.targets) {
      targets.push_back({{"type", t.type}, {"prob", t.prob}});
    }
    j["confounders"].push_back({{"driver", c.driver},
                                {"rate_per_day", c.rate_per_day},
                                {"latency_h", c.latency_h},
                                {"targets", targets}});
  }
  return j;
}

Scenario Scenario::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open scenario file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, "scenario file " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::json GroundTruth::to_json() const {
  nlohmann::json j;
  j["true_edges"] = nlohmann::json::array();
  for (const auto& e : true_edges) {
    j["true_edges"].push_back({{"cause", e.cause},
                               {"effect", e.effect},
                               {"window_s", {e.window.lo_s, e.window.hi_s}},
                               {"prob", e.prob},
                               {"origin", e.origin}});
  }
  j["spurious_pairs"] = nlohmann::json::array();
  for (const auto& p : spurious_pairs) {
    j["spurious_pairs"].push_back({{"a", p.a}, {"b", p.b}, {"driver", p.driver}});
  }
  return j;
}

SynthOutput generate(const Scenario& scenario) {
  scenario.validate();
  const std::int64_t span_s = scenario.span_days * kSecondsPerDay;

  SynthOutput out;
  for (const auto& b : scenario.background) out.taxonomy.add_type(b.type);
  for (const auto& r : scenario.rules) {
    out.taxonomy.add_type(r.cause);
    out.taxonomy.add_type(r.effect);
  }
  for (const auto& c : scenario.confounders) {
    out.taxonomy.add_type(c.driver);
    for (const auto& t : c.targets) out.taxonomy.add_type(t.type);
  }

  std::vector<Event> events;
  const auto emit = [&events](std::string id, const std::string& type, Instant ts,
                              nlohmann::json attrs) {
    Event e;
    e.id = std::move(id);
    e.type = type;
    e.timestamp = ts;
    e.attributes = std::move(attrs);
    e.source = "synth";
    events.push_back(std::move(e));
  };

  // Background processes: one substream per entry, so list order and seed
  // alone fix the output.
  for (std::size_t i = 0; i < scenario.background.size(); ++i) {
    const auto& b = scenario.background[i];
    Rng rng(substream_seed(scenario.seed, "background", i));
    const auto times = poisson_times(rng, b.rate_per_day, scenario.start, span_s);
    for (std::size_t n = 0; n < times.size(); ++n) {
      emit(seq_id("bg" + std::to_string(i), n), b.type, times[n],
           nlohmann::json::object());
    }
  }

  // Confounder drivers and their emitted targets.
  for (std::size_t i = 0; i < scenario.confounders.size(); ++i) {
    const auto& c = scenario.confounders[i];
    Rng rng(substream_seed(scenario.seed, "confounder", i));
    const auto times = poisson_times(rng, c.rate_per_day, scenario.start, span_s);
    const std::string origin = "confounder:" + std::to_string(i);
    std::size_t emitted = 0;
    for (std::size_t n = 0; n < times.size(); ++n) {
      const std::string driver_id = seq_id("cf" + std::to_string(i), n);
      emit(driver_id, c.driver, times[n], nlohmann::json::object());
      for (const auto& target : c.targets) {
        if (!rng.bernoulli(target.prob)) continue;
        const double latency = rng.uniform(0.0, c.latency_h * kSecondsPerHour);
        emit(seq_id("cf" + std::to_string(i) + "t", emitted++), target.type,
             times[n] + static_cast<Instant>(latency),
             {{"synth_origin", origin}, {"synth_cause", driver_id}});
      }
    }
  }

  // Planted rules, applied in order over all cause events generated so
  // far (background, confounder targets, earlier rules).
  for (std::size_t i = 0; i < scenario.rules.size(); ++i) {
    const auto& r = scenario.rules[i];
    Rng rng(substream_seed(scenario.seed, "rule", i));
    const std::string origin = "rule:" + std::to_string(i);
    std::vector<const Event*> causes;
    for (const auto& e : events) {
      if (e.type == r.cause) causes.push_back(&e);
    }
    std::sort(causes.begin(), causes.end(), [](const Event* a, const Event* b) {
      return event_before(*a, *b);
    });
    std::vector<Event> planted;
    for (std::size_t n = 0; n < causes.size(); ++n) {
      if (!rng.bernoulli(r.prob)) continue;
      const double latency = rng.uniform(static_cast<double>(r.window.lo_s),
                                         static_cast<double>(r.window.hi_s));
      Instant ts = causes[n]->timestamp + static_cast<Instant>(latency);
      Event e;
      e.id = seq_id("r" + std::to_string(i), planted.size());
      e.type = r.effect;
      e.timestamp = ts;
      e.attributes = {{"synth_origin", origin}, {"synth_cause", causes[n]->id}};
      e.source = "synth";
      planted.push_back(std::move(e));
    }
    for (auto& e : planted) events.push_back(std::move(e));
  }

  out.ledger = Ledger::from_events(std::move(events), out.taxonomy);

  for (std::size_t i = 0; i < scenario.rules.size(); ++i) {
    const auto& r = scenario.rules[i];
    out.truth.true_edges.push_back(
        {r.cause, r.effect, r.window, r.prob, "rule:" + std::to_string(i)});
  }
  for (std::size_t i = 0; i < scenario.confounders.size(); ++i) {
    const auto& c = scenario.confounders[i];
    const Window latency_window{0, static_cast<std::int64_t>(
                                       std::llround(c.latency_h * kSecondsPerHour))};
    for (const auto& t : c.targets) {
      out.truth.true_edges.push_back({c.driver, t.type, latency_window, t.prob,
                                      "confounder:" + std::to_string(i)});
    }
    for (const auto& a : c.targets) {
      for (const auto& b : c.targets) {
        if (a.type == b.type) continue;
        out.truth.spurious_pairs.push_back({a.type, b.type, c.driver});
      }
    }
  }
  return out;
}

}  // namespace ledgermine
