#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ledgermine/error.hpp"
#include "ledgermine/kgraph.hpp"
#include "ledgermine/rng.hpp"
#include "support/generators.hpp"
#include "support/reference.hpp"

using namespace ledgermine;
namespace fs = std::filesystem;

namespace {

Taxonomy graph_taxonomy() {
  Taxonomy tax;
  tax.add_type("exercise.bike");
  tax.add_type("exercise.run");
  tax.add_type("wellbeing.energy");
  tax.add_type("health.goal.weight");
  tax.add_type("app.instagram");
  tax.add_type("app.blog");
  return tax;
}

CausalEdge make_edge(const std::string& source, const std::string& target, Window w,
                     double weight, double confidence, const std::string& provenance,
                     Instant updated_at = 1000) {
  CausalEdge e;
  e.source = source;
  e.target = target;
  e.window = w;
  e.weight = weight;
  e.confidence = confidence;
  e.provenance = provenance;
  e.updated_at = updated_at;
  return e;
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("ledgermine_kgraph_" + name);
}

}  // namespace

TEST_SUITE("kgraph") {

TEST_CASE("insert into empty graph") {
  Taxonomy tax = graph_taxonomy();
  KnowledgeGraph g(tax);
  g.upsert(make_edge("exercise.bike", "wellbeing.energy", {0, 3600}, 0.4, 0.9, "mined"), tax);
  CHECK(g.edge_count() == 1);
  CHECK(g.nodes().size() == 2);
}

TEST_CASE("lower-confidence upsert keeps the stored edge, audit grows") {
  Taxonomy tax = graph_taxonomy();
  KnowledgeGraph g(tax);
  g.upsert(make_edge("exercise.bike", "wellbeing.energy", {0, 3600}, 0.4, 0.9, "mined", 100), tax);
  g.upsert(make_edge("exercise.bike", "wellbeing.energy", {0, 3600}, 0.2, 0.5, "expert", 200), tax);
  REQUIRE(g.edge_count() == 1);
  const auto& stored = g.edges().begin()->second;
  CHECK(stored.confidence == doctest::Approx(0.9));
  CHECK(stored.provenance == "mined");
  CHECK(stored.audit.size() == 2);
}

TEST_CASE("higher-confidence mined edge beats the expert seed, audit keeps both") {
  Taxonomy tax = graph_taxonomy();
  KnowledgeGraph g(tax);
  g.upsert(make_edge("exercise.bike", "wellbeing.energy", {0, 3600}, 0.3, 0.5, "expert", 100), tax);
  g.upsert(make_edge("exercise.bike", "wellbeing.energy", {0, 3600}, 0.45, 0.95, "mined", 200), tax);
  const auto& stored = g.edges().begin()->second;
  CHECK(stored.provenance == "mined");
  CHECK(stored.weight == doctest::Approx(0.45));
  REQUIRE(stored.audit.size() == 2);
  CHECK(stored.audit[0].provenance == "expert");
  CHECK(stored.audit[1].provenance == "mined");
}

TEST_CASE("same pair with different windows are distinct edges") {
  Taxonomy tax = graph_taxonomy();
  KnowledgeGraph g(tax);
  g.upsert(make_edge("exercise.bike", "wellbeing.energy", {0, 3600}, 0.4, 0.9, "mined"), tax);
  g.upsert(make_edge("exercise.bike", "wellbeing.energy", {3600, 7200}, 0.2, 0.8, "mined"), tax);
  CHECK(g.edge_count() == 2);
}

TEST_CASE("upsert validates shape") {
  Taxonomy tax = graph_taxonomy();
  KnowledgeGraph g(tax);
  CHECK_THROWS_WITH_AS(
      g.upsert(make_edge("jetpack", "wellbeing.energy", {0, 1}, 0.1, 0.5, "mined"), tax),
      doctest::Contains("UnknownEventType"), Error);
  CHECK_THROWS_AS(g.upsert(make_edge("exercise.bike", "wellbeing.energy", {5, 2}, 0.1, 0.5, "mined"), tax),
                  Error);
  CHECK_THROWS_AS(g.upsert(make_edge("exercise.bike", "wellbeing.energy", {0, 1}, 0.1, 1.5, "mined"), tax),
                  Error);
  CHECK_THROWS_AS(g.upsert(make_edge("exercise.bike", "wellbeing.energy", {0, 1}, 0.1, 0.5, "oracle"), tax),
                  Error);
}

TEST_CASE("expert rules file seeds edges") {
  Taxonomy tax = graph_taxonomy();
  const auto path = temp_file("rules.jsonl");
  {
    std::ofstream out(path);
    out << R"({"source":"exercise","target":"wellbeing.energy","window_h":[0,12],"weight":0.3,"confidence":0.5})" << "\n";
  }
  KnowledgeGraph g(tax);
  g.seed_expert_rules(path, tax);
  REQUIRE(g.edge_count() == 1);
  const auto& e = g.edges().begin()->second;
  CHECK(e.provenance == "expert");
  CHECK(e.window == Window{0, 12 * 3600});

  // Duplicate lines collapse to one edge with a two-entry audit.
  {
    std::ofstream out(path);
    out << R"({"source":"exercise","target":"wellbeing.energy","window_h":[0,12],"weight":0.3,"confidence":0.5})" << "\n";
    out << R"({"source":"exercise","target":"wellbeing.energy","window_h":[0,12],"weight":0.3,"confidence":0.5})" << "\n";
  }
  KnowledgeGraph g2(tax);
  g2.seed_expert_rules(path, tax);
  REQUIRE(g2.edge_count() == 1);
  CHECK(g2.edges().begin()->second.audit.size() == 2);

  // Empty file: unchanged.
  {
    std::ofstream out(path);
  }
  KnowledgeGraph g3(tax);
  g3.seed_expert_rules(path, tax);
  CHECK(g3.edge_count() == 0);

  // Unknown type reported with the line number.
  {
    std::ofstream out(path);
    out << R"({"source":"jetpack","target":"wellbeing.energy","window_h":[0,1],"weight":0.1,"confidence":0.5})" << "\n";
  }
  KnowledgeGraph g4(tax);
  CHECK_THROWS_WITH_AS(g4.seed_expert_rules(path, tax), doctest::Contains("line 1"), Error);
  fs::remove(path);
}

TEST_CASE("query filters combine and use descendant matching") {
  Taxonomy tax = graph_taxonomy();
  KnowledgeGraph g(tax);
  g.upsert(make_edge("exercise.bike", "wellbeing.energy", {0, 3600}, 0.4, 0.9, "mined"), tax);
  g.upsert(make_edge("exercise.run", "wellbeing.energy", {0, 3600}, 0.3, 0.7, "expert"), tax);
  g.upsert(make_edge("app.instagram", "exercise.bike", {0, 3600}, 0.2, 0.6, "mined"), tax);

  CHECK(g.query({}, tax).size() == 3);

  EdgeFilter by_source;
  by_source.source = "exercise";
  const auto exercise_edges = g.query(by_source, tax);
  REQUIRE(exercise_edges.size() == 2);
  CHECK(exercise_edges[0].source == "exercise.bike");  // higher confidence first
  CHECK(exercise_edges[1].source == "exercise.run");

  EdgeFilter none;
  none.target = "health.goal.weight";
  CHECK(g.query(none, tax).empty());

  EdgeFilter strong;
  strong.min_confidence = 0.65;
  strong.provenance = "mined";
  const auto strong_edges = g.query(strong, tax);
  REQUIRE(strong_edges.size() == 1);
  CHECK(strong_edges[0].source == "exercise.bike");
}

TEST_CASE("save and load round trip") {
  Taxonomy tax = graph_taxonomy();
  KnowledgeGraph g(tax);
  g.upsert(make_edge("exercise.bike", "wellbeing.energy", {0, 3600}, 0.4, 0.9, "mined", 500), tax);
  g.upsert(make_edge("exercise.bike", "wellbeing.energy", {0, 3600}, 0.2, 0.5, "expert", 600), tax);
  g.upsert(make_edge("app.instagram", "exercise.bike", {1800, 7200}, 0.25, 0.66, "mined", 700), tax);

  const auto path = temp_file("graph.json");
  g.save(path);
  const KnowledgeGraph back = KnowledgeGraph::load(path, tax);
  CHECK(back.taxonomy_id() == g.taxonomy_id());
  CHECK(back.nodes() == g.nodes());
  REQUIRE(back.edge_count() == g.edge_count());
  for (const auto& [key, e] : g.edges()) {
    const auto& b = back.edges().at(key);
    CHECK(b.weight == e.weight);
    CHECK(b.confidence == e.confidence);
    CHECK(b.provenance == e.provenance);
    CHECK(b.updated_at == e.updated_at);
    CHECK(b.audit.size() == e.audit.size());
  }

  // Empty graph round trip.
  KnowledgeGraph empty(tax);
  empty.save(path);
  CHECK(KnowledgeGraph::load(path, tax).edge_count() == 0);
  fs::remove(path);
}

TEST_CASE("load rejects a corrupted graph") {
  Taxonomy tax = graph_taxonomy();
  const auto path = temp_file("corrupt.json");
  {
    std::ofstream out(path);
    out << R"({"taxonomy_id":"x","nodes":["exercise.bike","jetpack"],"edges":[]})";
  }
  CHECK_THROWS_WITH_AS(KnowledgeGraph::load(path, tax), doctest::Contains("jetpack"), Error);
  {
    std::ofstream out(path);
    out << R"({"taxonomy_id":"x","nodes":["exercise.bike"],"edges":[
      {"source":"exercise.bike","target":"wellbeing.energy","window_s":[0,10],
       "weight":0.1,"confidence":0.5,"provenance":"mined","updated_at":"1970-01-01T00:00:00Z","audit":[]}]})";
    }
  CHECK_THROWS_WITH_AS(KnowledgeGraph::load(path, tax), doctest::Contains("non-node"), Error);
  fs::remove(path);
}

TEST_CASE("random operation sequences match the reference conflict rule (property)") {
  Taxonomy tax = graph_taxonomy();
  const std::vector<std::string> nodes = {"exercise.bike", "exercise.run",
                                          "wellbeing.energy", "app.instagram"};
  Rng rng(314);
  for (int round = 0; round < 50; ++round) {
    KnowledgeGraph g(tax);
    testing::ReferenceGraph ref;
    const int ops = static_cast<int>(rng.uniform_int(1, 40));
    for (int i = 0; i < ops; ++i) {
      const auto& src = nodes[static_cast<std::size_t>(rng.uniform_int(0, 3))];
      const auto& dst = nodes[static_cast<std::size_t>(rng.uniform_int(0, 3))];
      if (src == dst) continue;
      const Window w{rng.uniform_int(0, 2) * 3600, (rng.uniform_int(0, 2) + 2) * 3600};
      const double confidence = static_cast<double>(rng.uniform_int(0, 10)) / 10.0;
      const double weight = static_cast<double>(rng.uniform_int(-10, 10)) / 10.0;
      const auto provenance = rng.bernoulli(0.5) ? "mined" : "expert";
      const Instant updated = rng.uniform_int(0, 5) * 100;
      const CausalEdge e = make_edge(src, dst, w, weight, confidence, provenance, updated);
      g.upsert(e, tax);
      ref.upsert(e);
    }
    REQUIRE(g.edge_count() == ref.history().size());
    for (const auto& [key, records] : ref.history()) {
      const CausalEdge expected = ref.effective(key);
      const CausalEdge& got = g.edges().at(key);
      CHECK(got.confidence == expected.confidence);
      CHECK(got.weight == expected.weight);
      CHECK(got.provenance == expected.provenance);
      CHECK(got.updated_at == expected.updated_at);
      CHECK(got.audit.size() == records.size());
    }
  }
}

TEST_CASE("upsert is idempotent for identical edges") {
  Taxonomy tax = graph_taxonomy();
  KnowledgeGraph g(tax);
  const auto e = make_edge("exercise.bike", "wellbeing.energy", {0, 3600}, 0.4, 0.9, "mined");
  g.upsert(e, tax);
  g.upsert(e, tax);
  REQUIRE(g.edge_count() == 1);
  const auto& stored = g.edges().begin()->second;
  CHECK(stored.weight == e.weight);
  CHECK(stored.confidence == e.confidence);
  CHECK(stored.provenance == e.provenance);
  CHECK(stored.updated_at == e.updated_at);
}

TEST_CASE("DOT export is deterministic and labeled") {
  Taxonomy tax = graph_taxonomy();
  KnowledgeGraph g(tax);
  CHECK(g.to_dot() == "digraph ledgermine {\n}\n");
  g.upsert(make_edge("exercise.bike", "wellbeing.energy", {7200, 14400}, 0.42, 0.95, "mined"), tax);
  const std::string dot = g.to_dot();
  CHECK(dot == g.to_dot());
  CHECK(dot.find("\"exercise.bike\" -> \"wellbeing.energy\"") != std::string::npos);
  CHECK(dot.find("w=0.42 c=0.95 [2,4]h") != std::string::npos);
}

}  // TEST_SUITE
