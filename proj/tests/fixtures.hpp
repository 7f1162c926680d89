#pragma once

// Hand-built schema graphs and rule-fixture descriptions shared by the unit
// tests and the acceptance runner.

#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "biaswalk/graph.hpp"
#include "biaswalk/weighting.hpp"
#include "oracles.hpp"

#ifndef BIASWALK_RULES_DIR
#error "BIASWALK_RULES_DIR must point at the shipped rule files"
#endif

namespace fixtures {

inline std::string rules_path(const std::string& name) { return std::string(BIASWALK_RULES_DIR) + "/" + name; }

inline std::string read_rules(const std::string& name) {
  std::ifstream in(rules_path(name));
  if (!in) throw std::runtime_error("missing rule file " + rules_path(name));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Research-institute schema: every edge kind the AIFB functions distinguish,
/// plus untyped and multiply typed end nodes. Uses `#` local names.
inline biaswalk::PropertyGraph aifb_schema_graph() {
  const std::string ns = "http://swrc.example.org/ontology#";
  const std::string id = "http://www.aifb.example.org/id/";
  biaswalk::GraphBuilder b;
  auto node = [&](const std::string& name, std::initializer_list<const char*> types) {
    const auto n = b.add_node(id + name);
    for (const char* t : types) b.add_type(n, ns + t);
    return n;
  };
  const auto alice = node("alice", {"Person"});
  const auto bob = node("bob", {"Person", "Employee"});
  const auto group = node("group1", {"ResearchGroup"});
  const auto project = node("projectX", {"Project"});
  const auto topic = node("topicML", {"ResearchTopic"});
  const auto pub = node("pub7", {"Publication", "InProceedings"});
  const auto org = node("kit", {"Organization"});
  const auto page = node("alice-homepage", {});

  auto edge = [&](biaswalk::NodeId s, const char* label, biaswalk::NodeId o) { b.add_edge(s, ns + label, o); };
  edge(alice, "affiliation", group);
  edge(group, "member", alice);
  edge(bob, "affiliation", group);
  edge(group, "member", bob);
  edge(alice, "worksAtProject", project);
  edge(project, "isWorkedOnBy", alice);
  edge(project, "isAbout", topic);
  edge(topic, "isWorkedOnBy", bob);
  edge(alice, "publication", pub);
  edge(pub, "author", alice);
  edge(pub, "author", bob);
  edge(pub, "isAbout", topic);
  edge(bob, "publication", pub);
  edge(group, "carriedOutBy", org);
  edge(alice, "homepage", page);
  edge(org, "member", pub);  // unusual: member edge into a publication
  edge(alice, "knows", alice);
  return std::move(b).build();
}

/// Geological vocabulary schema: a concept hierarchy with units below
/// leaves, lithogenesis links at several depths and scheme membership.
/// Uses `/` local names.
inline biaswalk::PropertyGraph bgs_schema_graph() {
  const std::string ns = "http://data.bgs.example.org/ref/";
  biaswalk::GraphBuilder b;
  auto node = [&](const std::string& name, std::initializer_list<const char*> types) {
    const auto n = b.add_node(ns + "id/" + name);
    for (const char* t : types) b.add_type(n, ns + t);
    return n;
  };
  const auto top = node("igneous", {"Concept"});
  const auto mid = node("volcanic", {"Concept"});
  const auto leaf = node("basalt", {"Concept"});
  const auto unit = node("unit-42", {"NamedRockUnit"});
  const auto orphan = node("mudstone", {"Concept"});
  const auto cls_a = node("magmatic", {"Lithogenesis"});
  const auto cls_b = node("sedimentary", {"Lithogenesis"});
  const auto scheme = node("rock-scheme", {"ConceptScheme"});
  const auto theme = node("theme-3", {});

  auto edge = [&](biaswalk::NodeId s, const char* label, biaswalk::NodeId o) { b.add_edge(s, ns + label, o); };
  edge(unit, "broader", leaf);
  edge(leaf, "narrower", unit);
  edge(leaf, "broader", mid);
  edge(mid, "narrower", leaf);
  edge(mid, "broader", top);
  edge(top, "narrower", mid);
  edge(unit, "hasLithogenesis", cls_a);
  edge(leaf, "hasLithogenesis", cls_a);
  edge(mid, "hasLithogenesis", cls_a);
  edge(top, "hasLithogenesis", cls_a);
  edge(orphan, "hasLithogenesis", cls_b);
  edge(top, "inScheme", scheme);
  edge(leaf, "inScheme", scheme);
  edge(orphan, "inScheme", scheme);
  edge(unit, "hasTheme", theme);
  edge(theme, "broader", theme);
  edge(scheme, "hasTopConcept", top);
  return std::move(b).build();
}

/// Oracle view of one edge: label local name, end-node type local names and
/// whether the start node has an outgoing `broader` edge.
inline oracle::EdgeView view_of(const biaswalk::PropertyGraph& g, biaswalk::EdgeIndex e) {
  const auto& edge = g.edge(e);
  oracle::EdgeView v;
  v.label = std::string(biaswalk::local_name(g.symbol(edge.label)));
  for (const auto t : g.types(edge.end)) v.end_types.insert(std::string(biaswalk::local_name(g.symbol(t))));
  for (const auto o : g.out_edges(edge.start))
    if (biaswalk::local_name(g.label(o)) == "broader") v.start_has_broader = true;
  return v;
}

struct RuleFixture {
  const char* file;
  bool aifb;  // which schema graph the function is written for
  std::function<double(const oracle::EdgeView&)> expected;
};

/// The nine rule files with the hyperparameters they ship with.
inline std::vector<RuleFixture> rule_fixtures() {
  using namespace oracle;
  return {
      {"aifb-1.rules", true, [](const EdgeView& e) { return aifb_1(e, 0.1, 10); }},
      {"aifb-2.rules", true, [](const EdgeView& e) { return aifb_2(e, 0.1, 10); }},
      {"aifb-3.rules", true, [](const EdgeView& e) { return aifb_3(e, 0.1, 10); }},
      {"aifb-4.rules", true, [](const EdgeView& e) { return aifb_4(e, 0.1, 10, 100); }},
      {"bgs-1.rules", false, [](const EdgeView& e) { return bgs_1(e, 0.1, 10); }},
      {"bgs-2.rules", false, [](const EdgeView& e) { return bgs_2(e, 0.001, 1); }},
      {"bgs-3.rules", false, [](const EdgeView& e) { return bgs_3(e, 0.1, 10, 100); }},
      {"bgs-4.rules", false, [](const EdgeView& e) { return bgs_4(e, 0.1, 1); }},
      {"bgs-5.rules", false, [](const EdgeView& e) { return bgs_5(e, 0.1, 10, 100); }},
  };
}

/// Random multigraph with up to `max_edges` edges over a small node and label
/// pool, including self-loops and repeated edges.
template <class Rng>
std::vector<oracle::PlainEdge> random_edges(Rng& rng, std::size_t max_edges) {
  const std::size_t nodes = 1 + rng.below(12);
  const std::size_t labels = 1 + rng.below(5);
  const std::size_t m = rng.below(max_edges + 1);
  std::vector<oracle::PlainEdge> out;
  for (std::size_t i = 0; i < m; ++i) {
    out.push_back({"http://g/n" + std::to_string(rng.below(nodes)), "http://g/p" + std::to_string(rng.below(labels)),
                   "http://g/n" + std::to_string(rng.below(nodes))});
  }
  return out;
}

inline std::vector<biaswalk::Triple> to_triples(const std::vector<oracle::PlainEdge>& edges) {
  std::vector<biaswalk::Triple> t;
  for (const auto& e : edges) t.push_back(biaswalk::Triple{e.s, e.p, biaswalk::Iri{e.o}});
  return t;
}

}  // namespace fixtures
