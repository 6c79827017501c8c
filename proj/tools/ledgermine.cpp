// ledgermine - event ledger mining, causal testing, and guidance CLI.
//
// Subcommands wire the pipeline end to end: ingest -> mine -> test ->
// graph build -> recommend, plus synth for ground-truth scenarios and
// pipeline for the whole chain. Every run writes a JSON manifest next to
// its output, including on failure. Exit codes: 0 success, 1 validation
// error, 2 usage error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ledgermine/causal.hpp"
#include "ledgermine/error.hpp"
#include "ledgermine/guidance.hpp"
#include "ledgermine/kgraph.hpp"
#include "ledgermine/ledger.hpp"
#include "ledgermine/miner.hpp"
#include "ledgermine/pattern.hpp"
#include "ledgermine/rng.hpp"
#include "ledgermine/synth.hpp"
#include "ledgermine/taxonomy.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ledgermine;

namespace {

constexpr const char* kVersion = "0.1.0";

enum class LogLevel { debug = 0, info = 1, warn = 2, error = 3 };

LogLevel log_threshold() {
  const char* env = std::getenv("LEDGERMINE_LOG");
  if (env == nullptr) return LogLevel::warn;
  const std::string level(env);
  if (level == "debug") return LogLevel::debug;
  if (level == "info") return LogLevel::info;
  if (level == "error") return LogLevel::error;
  return LogLevel::warn;
}

void log(LogLevel level, const std::string& message) {
  static const LogLevel threshold = log_threshold();
  if (level < threshold) return;
  static const char* names[] = {"debug", "info", "warn", "error"};
  std::cerr << "[" << names[static_cast<int>(level)] << "] " << message << "\n";
}

json read_json_file(const fs::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, std::string("cannot open ") + what + " " + path.string());
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, std::string(what) + " " + path.string() + ": " + e.what());
  }
}

void write_json_file(const json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

// One manifest per run, written on success and on failure alike.
struct Manifest {
  std::string command;
  std::vector<std::string> argv;
  std::uint64_t seed = 0;
  json inputs = json::object();
  json outputs = json::object();
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  std::string started_at;
  fs::path path = "ledgermine-manifest.json";

  void finish(const std::string& status, const std::string& error = {}) const {
    json j;
    j["tool"] = "ledgermine";
    j["version"] = kVersion;
    j["command"] = command;
    j["argv"] = argv;
    j["seed"] = seed;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["started_at"] = started_at;
    j["duration_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
    j["status"] = status;
    if (!error.empty()) j["error"] = error;
    try {
      write_json_file(j, path);
    } catch (const Error& e) {
      log(LogLevel::error, std::string("manifest not written: ") + e.what());
    }
  }
};

std::string now_iso() {
  const auto t = std::chrono::system_clock::now();
  return format_instant(std::chrono::duration_cast<std::chrono::seconds>(t.time_since_epoch()).count());
}

struct CommonOpts {
  std::string ledger_path;
  std::string taxonomy_path;
  std::string config_path;
  std::string graph_path;
  std::string context_path;
  std::string scenario_path;
  std::string rules_path;
  std::string hypotheses_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool lenient = false;
  int top = 10;
  double min_confidence = 0.5;
};

Ledger load_ledger_checked(const CommonOpts& opts, const Taxonomy& tax) {
  const auto mode = opts.lenient ? IngestMode::lenient : IngestMode::strict;
  auto result = load_ledger(opts.ledger_path, tax, mode);
  for (const auto& skipped : result.skipped) {
    log(LogLevel::warn, "skipped line " + std::to_string(skipped.line_number) + ": " +
                            skipped.reason);
  }
  return std::move(result.ledger);
}

MinerConfig miner_config(const CommonOpts& opts) {
  if (opts.config_path.empty()) return MinerConfig{};
  return MinerConfig::from_json(read_json_file(opts.config_path, "miner config"));
}

CausalConfig causal_config(const std::string& path) {
  if (path.empty()) return CausalConfig{};
  return CausalConfig::from_json(read_json_file(path, "causal config"));
}

json hypotheses_to_json(const std::vector<Hypothesis>& hs) {
  json arr = json::array();
  for (const auto& h : hs) arr.push_back(h.to_json());
  return arr;
}

int run_ingest(const CommonOpts& opts, Manifest& manifest) {
  const Taxonomy tax = Taxonomy::load(opts.taxonomy_path);
  const Ledger ledger = load_ledger_checked(opts, tax);
  save_ledger(ledger, opts.out_path);
  manifest.outputs["ledger"] = opts.out_path;
  log(LogLevel::info, "ingested " + std::to_string(ledger.size()) + " events");
  return 0;
}

int run_mine(const CommonOpts& opts, Manifest& manifest) {
  const Taxonomy tax = Taxonomy::load(opts.taxonomy_path);
  const Ledger ledger = load_ledger_checked(opts, tax);
  const auto hypotheses = mine_associations(ledger, tax, miner_config(opts));
  write_json_file(hypotheses_to_json(hypotheses), opts.out_path);
  manifest.outputs["hypotheses"] = opts.out_path;
  log(LogLevel::info, "mined " + std::to_string(hypotheses.size()) + " hypotheses");
  return 0;
}

int run_test(const CommonOpts& opts, Manifest& manifest) {
  const Taxonomy tax = Taxonomy::load(opts.taxonomy_path);
  const Ledger ledger = load_ledger_checked(opts, tax);
  const Hypothesis h = Hypothesis::from_json(read_json_file(opts.hypotheses_path, "hypothesis"));
  validate_pattern(parse_pattern(h.antecedent), tax);
  if (!tax.contains(h.outcome)) {
    throw Error(Errc::unknown_event_type, "outcome '" + h.outcome + "' not in taxonomy");
  }
  const CausalConfig cfg = causal_config(opts.config_path);
  const CausalResult result = evaluate(ledger, h, cfg.confounders, cfg, opts.seed);
  json out = result.to_json();
  out["hypothesis"] = h.to_json();
  out["significant"] = result.p_value <= cfg.alpha;
  write_json_file(out, opts.out_path);
  manifest.outputs["result"] = opts.out_path;
  return 0;
}

// Tests the top hypotheses and applies the significant ones plus any
// expert rules to a fresh graph.
KnowledgeGraph build_graph(const Ledger& ledger, const Taxonomy& tax,
                           const std::vector<Hypothesis>& hypotheses,
                           const std::string& rules_path, const CausalConfig& cfg, int top,
                           std::uint64_t seed, json& tested_report) {
  KnowledgeGraph graph(tax);
  if (!rules_path.empty()) {
    graph.seed_expert_rules(rules_path, tax);
  }
  const Instant stamp = ledger.empty() ? 0 : ledger.span().second;
  const std::size_t n = std::min<std::size_t>(hypotheses.size(),
                                              top < 0 ? hypotheses.size()
                                                      : static_cast<std::size_t>(top));
  for (std::size_t i = 0; i < n; ++i) {
    const Hypothesis& h = hypotheses[i];
    json entry;
    entry["hypothesis"] = h.to_json();
    try {
      const CausalResult r =
          evaluate(ledger, h, cfg.confounders, cfg, substream_seed(seed, "test", i));
      const bool significant = r.p_value <= cfg.alpha;
      entry["p_value"] = r.p_value;
      entry["pooled_effect"] = r.pooled_effect;
      entry["n_strata"] = r.n_strata;
      entry["significant"] = significant;
      if (significant) {
        CausalEdge e;
        e.source = h.antecedent;  // depth-1 antecedents are bare type paths
        e.target = h.outcome;
        e.window = h.window;
        e.weight = std::clamp(r.pooled_effect, -1.0, 1.0);
        e.confidence = 1.0 - r.p_value;
        e.provenance = "mined";
        e.evidence = EvidenceSummary{r.pooled_effect, r.p_value, r.n_strata,
                                     r.permutations, r.seed};
        e.updated_at = stamp;
        graph.upsert(std::move(e), tax);
      }
    } catch (const Error& e) {
      entry["error"] = std::string(e.what());
      log(LogLevel::warn, "hypothesis " + h.antecedent + " -> " + h.outcome +
                              " not testable: " + e.what());
    }
    tested_report.push_back(std::move(entry));
  }
  return graph;
}

int run_graph_build(const CommonOpts& opts, Manifest& manifest) {
  const Taxonomy tax = Taxonomy::load(opts.taxonomy_path);
  const Ledger ledger = load_ledger_checked(opts, tax);
  std::vector<Hypothesis> hypotheses;
  for (const auto& j : read_json_file(opts.hypotheses_path, "hypotheses")) {
    hypotheses.push_back(Hypothesis::from_json(j));
  }
  const CausalConfig cfg = causal_config(opts.config_path);
  json tested = json::array();
  const KnowledgeGraph graph =
      build_graph(ledger, tax, hypotheses, opts.rules_path, cfg, opts.top, opts.seed, tested);
  graph.save(opts.out_path);
  manifest.outputs["graph"] = opts.out_path;
  manifest.outputs["tested"] = tested.size();
  log(LogLevel::info, "graph has " + std::to_string(graph.edge_count()) + " edges");
  return 0;
}

int run_graph_export_dot(const CommonOpts& opts, Manifest& manifest) {
  const Taxonomy tax = Taxonomy::load(opts.taxonomy_path);
  const KnowledgeGraph graph = KnowledgeGraph::load(opts.graph_path, tax);
  graph.export_dot(opts.out_path);
  manifest.outputs["dot"] = opts.out_path;
  return 0;
}

int run_recommend(const CommonOpts& opts, Manifest& manifest) {
  const Taxonomy tax = Taxonomy::load(opts.taxonomy_path);
  const KnowledgeGraph graph = KnowledgeGraph::load(opts.graph_path, tax);
  const GuidanceContext ctx =
      GuidanceContext::from_json(read_json_file(opts.context_path, "context"));
  const auto recs = recommend(graph, ctx, tax, opts.min_confidence);
  json out = json::array();
  for (const auto& r : recs) out.push_back(r.to_json());
  write_json_file(out, opts.out_path);
  manifest.outputs["recommendations"] = opts.out_path;
  return 0;
}

struct SynthPaths {
  fs::path ledger, taxonomy, truth;
  explicit SynthPaths(const std::string& prefix)
      : ledger(prefix + ".ledger.jsonl"),
        taxonomy(prefix + ".taxonomy.json"),
        truth(prefix + ".truth.json") {}
};

SynthOutput run_synth_to_files(const CommonOpts& opts, Manifest& manifest, bool seed_given) {
  Scenario scenario = Scenario::load(opts.scenario_path);
  if (seed_given) scenario.seed = opts.seed;
  const SynthOutput out = generate(scenario);
  const SynthPaths paths(opts.out_path);
  save_ledger(out.ledger, paths.ledger);
  out.taxonomy.save(paths.taxonomy);
  write_json_file(out.truth.to_json(), paths.truth);
  manifest.outputs["ledger"] = paths.ledger.string();
  manifest.outputs["taxonomy"] = paths.taxonomy.string();
  manifest.outputs["truth"] = paths.truth.string();
  log(LogLevel::info, "generated " + std::to_string(out.ledger.size()) + " events");
  return out;
}

int run_pipeline(const CommonOpts& opts, const std::string& causal_config_path,
                 Manifest& manifest, bool seed_given) {
  Taxonomy tax;
  Ledger ledger;
  std::optional<GroundTruth> truth;

  if (!opts.scenario_path.empty()) {
    const SynthOutput out = run_synth_to_files(opts, manifest, seed_given);
    tax = out.taxonomy;
    ledger = out.ledger;
    truth = out.truth;
  } else {
    tax = Taxonomy::load(opts.taxonomy_path);
    ledger = load_ledger_checked(opts, tax);
  }

  const auto hypotheses = mine_associations(ledger, tax, miner_config(opts));
  const fs::path hypotheses_path(opts.out_path + ".hypotheses.json");
  write_json_file(hypotheses_to_json(hypotheses), hypotheses_path);

  const CausalConfig cfg = causal_config(causal_config_path);
  json tested = json::array();
  const KnowledgeGraph graph =
      build_graph(ledger, tax, hypotheses, opts.rules_path, cfg, opts.top, opts.seed, tested);
  const fs::path graph_path(opts.out_path + ".graph.json");
  graph.save(graph_path);

  // Report with discovery quality against the planted ground truth when
  // the run started from a scenario.
  json report;
  report["events"] = ledger.size();
  report["hypotheses_mined"] = hypotheses.size();
  report["hypotheses_tested"] = tested.size();
  report["tested"] = tested;
  report["graph"] = graph_path.filename().string();
  std::size_t significant = 0;
  for (const auto& t : tested) {
    if (t.value("significant", false)) ++significant;
  }
  report["significant"] = significant;
  if (truth) {
    // Discovery quality over distinct (source, target) pairs.
    std::set<std::pair<std::string, std::string>> true_pairs;
    for (const auto& e : truth->true_edges) true_pairs.insert({e.cause, e.effect});
    std::set<std::pair<std::string, std::string>> discovered;
    for (const auto& t : tested) {
      if (!t.value("significant", false)) continue;
      const auto& h = t["hypothesis"];
      discovered.insert(
          {h["antecedent"].get<std::string>(), h["outcome"].get<std::string>()});
    }
    std::size_t tp = 0;
    for (const auto& pair : discovered) {
      if (true_pairs.count(pair)) ++tp;
    }
    report["precision"] = discovered.empty()
                              ? json(nullptr)
                              : json(static_cast<double>(tp) /
                                     static_cast<double>(discovered.size()));
    report["recall"] = true_pairs.empty()
                           ? json(nullptr)
                           : json(static_cast<double>(tp) / static_cast<double>(true_pairs.size()));
  }
  const fs::path report_path(opts.out_path + ".report.json");
  write_json_file(report, report_path);
  manifest.outputs["hypotheses"] = hypotheses_path.string();
  manifest.outputs["graph"] = graph_path.string();
  manifest.outputs["report"] = report_path.string();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"event ledger mining, causal testing, and guidance"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOpts opts;
  std::string causal_config_path;

  const auto add_seed = [&](CLI::App* cmd) {
    return cmd->add_option("--seed", opts.seed, "seed for all randomness");
  };
  const auto add_out = [&](CLI::App* cmd, const char* help) {
    cmd->add_option("--out", opts.out_path, help)->required();
  };

  auto* ingest = app.add_subcommand("ingest", "validate and normalize a ledger");
  ingest->add_option("--ledger", opts.ledger_path, "JSONL event file")->required();
  ingest->add_option("--taxonomy", opts.taxonomy_path, "taxonomy JSON")->required();
  add_out(ingest, "normalized JSONL path");
  auto* lenient_flag = ingest->add_flag("--lenient", opts.lenient, "skip invalid lines with a warning");
  ingest->add_flag("--strict", "reject invalid lines (default)")->excludes(lenient_flag);

  auto* mine = app.add_subcommand("mine", "mine ranked association hypotheses");
  mine->add_option("--ledger", opts.ledger_path)->required();
  mine->add_option("--taxonomy", opts.taxonomy_path)->required();
  mine->add_option("--config", opts.config_path, "miner config JSON");
  add_out(mine, "hypotheses JSON path");

  auto* test = app.add_subcommand("test", "causally test one hypothesis");
  test->add_option("--ledger", opts.ledger_path)->required();
  test->add_option("--taxonomy", opts.taxonomy_path)->required();
  test->add_option("--hypothesis", opts.hypotheses_path, "hypothesis JSON file")->required();
  test->add_option("--config", opts.config_path, "causal config JSON");
  add_seed(test);
  add_out(test, "CausalResult JSON path");

  auto* graph = app.add_subcommand("graph", "knowledge graph operations");
  graph->require_subcommand(1);
  auto* build = graph->add_subcommand("build", "test hypotheses and build the graph");
  build->add_option("--ledger", opts.ledger_path)->required();
  build->add_option("--taxonomy", opts.taxonomy_path)->required();
  build->add_option("--hypotheses", opts.hypotheses_path, "mined hypotheses JSON")->required();
  build->add_option("--rules", opts.rules_path, "expert rules JSONL");
  build->add_option("--config", opts.config_path, "causal config JSON");
  build->add_option("--top", opts.top, "number of top hypotheses to test");
  add_seed(build);
  add_out(build, "graph JSON path");
  auto* export_dot = graph->add_subcommand("export-dot", "render the graph as DOT");
  export_dot->add_option("--graph", opts.graph_path)->required();
  export_dot->add_option("--taxonomy", opts.taxonomy_path)->required();
  add_out(export_dot, "DOT file path");

  auto* rec = app.add_subcommand("recommend", "context-sensitive guidance");
  rec->add_option("--graph", opts.graph_path)->required();
  rec->add_option("--taxonomy", opts.taxonomy_path)->required();
  rec->add_option("--context", opts.context_path, "context JSON")->required();
  rec->add_option("--min-confidence", opts.min_confidence, "confidence threshold");
  add_out(rec, "recommendations JSON path");

  auto* synth = app.add_subcommand("synth", "generate a synthetic ledger with ground truth");
  synth->add_option("--scenario", opts.scenario_path, "scenario JSON")->required();
  auto* synth_seed = add_seed(synth);
  add_out(synth, "output prefix");

  auto* pipeline = app.add_subcommand("pipeline", "synth|ingest -> mine -> test -> graph -> report");
  pipeline->add_option("--scenario", opts.scenario_path, "scenario JSON (synth mode)");
  pipeline->add_option("--ledger", opts.ledger_path, "ledger JSONL (ingest mode)");
  pipeline->add_option("--taxonomy", opts.taxonomy_path);
  pipeline->add_option("--config", opts.config_path, "miner config JSON");
  pipeline->add_option("--causal-config", causal_config_path, "causal config JSON");
  pipeline->add_option("--rules", opts.rules_path, "expert rules JSONL");
  pipeline->add_option("--top", opts.top, "number of top hypotheses to test");
  auto* pipeline_seed = add_seed(pipeline);
  add_out(pipeline, "output prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  Manifest manifest;
  for (int i = 0; i < argc; ++i) manifest.argv.emplace_back(argv[i]);
  manifest.seed = opts.seed;
  manifest.started_at = now_iso();
  if (!opts.out_path.empty()) manifest.path = opts.out_path + ".manifest.json";
  for (const auto& [label, value] :
       std::initializer_list<std::pair<const char*, const std::string*>>{
           {"ledger", &opts.ledger_path},     {"taxonomy", &opts.taxonomy_path},
           {"config", &opts.config_path},     {"graph", &opts.graph_path},
           {"context", &opts.context_path},   {"scenario", &opts.scenario_path},
           {"rules", &opts.rules_path},       {"hypotheses", &opts.hypotheses_path},
           {"causal_config", &causal_config_path}}) {
    if (!value->empty()) manifest.inputs[label] = *value;
  }

  try {
    int rc = 0;
    if (app.got_subcommand(ingest)) {
      manifest.command = "ingest";
      rc = run_ingest(opts, manifest);
    } else if (app.got_subcommand(mine)) {
      manifest.command = "mine";
      rc = run_mine(opts, manifest);
    } else if (app.got_subcommand(test)) {
      manifest.command = "test";
      rc = run_test(opts, manifest);
    } else if (app.got_subcommand(graph)) {
      if (graph->got_subcommand(build)) {
        manifest.command = "graph build";
        rc = run_graph_build(opts, manifest);
      } else {
        manifest.command = "graph export-dot";
        rc = run_graph_export_dot(opts, manifest);
      }
    } else if (app.got_subcommand(rec)) {
      manifest.command = "recommend";
      rc = run_recommend(opts, manifest);
    } else if (app.got_subcommand(synth)) {
      manifest.command = "synth";
      run_synth_to_files(opts, manifest, synth_seed->count() > 0);
    } else if (app.got_subcommand(pipeline)) {
      manifest.command = "pipeline";
      if (opts.scenario_path.empty() && opts.ledger_path.empty()) {
        throw Error(Errc::invalid_config, "pipeline needs --scenario or --ledger");
      }
      if (opts.scenario_path.empty() && opts.taxonomy_path.empty()) {
        throw Error(Errc::invalid_config, "pipeline ingest mode needs --taxonomy");
      }
      rc = run_pipeline(opts, causal_config_path, manifest, pipeline_seed->count() > 0);
    }
    manifest.finish("ok");
    return rc;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    manifest.finish("error", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    manifest.finish("error", e.what());
    return 1;
  }
}
