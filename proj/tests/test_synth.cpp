#include <catch_amalgamated.hpp>

#include <map>
#include <set>

#include "biaswalk/synth.hpp"

using namespace biaswalk;

namespace {

const std::string aifb(affiliation_ns);
const std::string bgs(hierarchy_ns);

/// Every node named in the dataset exists, every edge endpoint is a valid
/// node, and out-edge lists are consistent with the edge array.
void check_graph_invariants(const SynthResult& r) {
  const auto& g = r.graph;
  std::size_t listed = 0;
  for (std::uint32_t n = 0; n < g.node_count(); ++n) {
    CHECK(g.find(g.name(NodeId{n})) == NodeId{n});
    for (const auto e : g.out_edges(NodeId{n})) CHECK(g.edge(e).start == NodeId{n});
    listed += g.out_degree(NodeId{n});
  }
  CHECK(listed == g.edge_count());
  for (const auto& e : g.edges()) CHECK(e.end.value < g.node_count());
  for (const auto& x : r.dataset.train) CHECK(g.find(x.node));
  for (const auto& x : r.dataset.test) CHECK(g.find(x.node));
  CHECK_NOTHROW(r.dataset.validate());
}

/// Direct edges between a node and its own label node, in either direction.
std::size_t label_edges(const PropertyGraph& g, const LabeledNode& x) {
  const auto n = g.find(x.node);
  const auto l = g.find(x.label);
  if (!n || !l) return 0;
  std::size_t count = 0;
  for (const auto& e : g.edges())
    if ((e.start == *n && e.end == *l) || (e.start == *l && e.end == *n)) ++count;
  return count;
}

std::vector<NodeId> targets(const PropertyGraph& g, NodeId n, const std::string& label) {
  std::vector<NodeId> out;
  for (const auto e : g.out_edges(n))
    if (g.label(e) == label) out.push_back(g.edge(e).end);
  return out;
}

std::string group_of_person(const std::string& iri) {
  const auto pos = iri.find("person/g");
  if (pos == std::string::npos) return "external";
  return iri.substr(pos + 7, iri.find('-', pos) - pos - 7);
}

}  // namespace

TEST_CASE("tiny noise-free affiliation graph", "[synth][affiliation]") {
  AffiliationSynthConfig cfg;
  cfg.groups = 2;
  cfg.persons_per_group = 2;
  cfg.publications = 0;
  cfg.external_author_fraction = 0;
  cfg.cross_group_pub_fraction = 0;
  const auto r = generate_affiliation_graph(cfg);
  check_graph_invariants(r);

  std::map<std::string, std::size_t> per_label;
  for (const auto& x : r.dataset.train) ++per_label[x.label];
  for (const auto& x : r.dataset.test) ++per_label[x.label];
  CHECK(per_label == std::map<std::string, std::size_t>{{aifb + "group/g0", 2}, {aifb + "group/g1", 2}});

  // With no publications every edge stays inside one group.
  const auto& g = r.graph;
  for (const auto& e : g.edges()) {
    const auto& s = g.name(e.start);
    const auto& o = g.name(e.end);
    auto group = [](const std::string& iri) { return iri.substr(iri.rfind("/g") + 2, 1); };
    CHECK(group(s) == group(o));
  }
}

TEST_CASE("full external authorship", "[synth][affiliation]") {
  AffiliationSynthConfig cfg;
  cfg.external_author_fraction = 1;
  cfg.cross_group_pub_fraction = 0;
  cfg.publications = 100;
  const auto r = generate_affiliation_graph(cfg);
  check_graph_invariants(r);
  const auto& g = r.graph;
  for (std::uint32_t n = 0; n < cfg.publications; ++n) {
    const auto pub = g.find(aifb + "publication/n" + std::to_string(n));
    REQUIRE(pub);
    std::set<std::string> groups;
    for (const auto a : targets(g, *pub, aifb + "author")) groups.insert(group_of_person(g.name(a)));
    CHECK(groups.contains("external"));
    CHECK(groups.size() >= 2);
  }
}

TEST_CASE("cross-group fraction one mixes two groups on every publication", "[synth][affiliation]") {
  AffiliationSynthConfig cfg;
  cfg.external_author_fraction = 0;
  cfg.cross_group_pub_fraction = 1;
  cfg.publications = 100;
  const auto r = generate_affiliation_graph(cfg);
  const auto& g = r.graph;
  for (std::uint32_t n = 0; n < cfg.publications; ++n) {
    std::set<std::string> groups;
    for (const auto a : targets(g, *g.find(aifb + "publication/n" + std::to_string(n)), aifb + "author"))
      groups.insert(group_of_person(g.name(a)));
    CHECK(groups.size() == 2);
    CHECK_FALSE(groups.contains("external"));
  }
}

TEST_CASE("affiliation class balance and split", "[synth][affiliation][property]") {
  for (const std::uint64_t seed : {1u, 2u, 3u}) {
    AffiliationSynthConfig cfg;
    cfg.seed = seed;
    cfg.groups = 3 + static_cast<std::uint32_t>(seed);
    cfg.persons_per_group = 10 + static_cast<std::uint32_t>(seed);
    const auto r = generate_affiliation_graph(cfg);
    check_graph_invariants(r);
    std::map<std::string, std::size_t> total, train;
    for (const auto& x : r.dataset.train) {
      ++total[x.label];
      ++train[x.label];
    }
    for (const auto& x : r.dataset.test) ++total[x.label];
    CHECK(total.size() == cfg.groups);
    for (const auto& [label, n] : total) {
      CHECK(n + 1 >= cfg.persons_per_group);
      CHECK(n <= cfg.persons_per_group + 1);
      CHECK(train[label] == (n * 7 + 5) / 10);
    }
  }
}

TEST_CASE("test persons carry no label edges, train persons do", "[synth][affiliation][property]") {
  const auto r = generate_affiliation_graph(AffiliationSynthConfig{});
  for (const auto& x : r.dataset.test) CHECK(label_edges(r.graph, x) == 0);
  for (const auto& x : r.dataset.train) CHECK(label_edges(r.graph, x) == 2);
}

TEST_CASE("synthetic generators are deterministic", "[synth][determinism]") {
  AffiliationSynthConfig a;
  a.seed = 42;
  const auto a1 = generate_affiliation_graph(a), a2 = generate_affiliation_graph(a);
  CHECK(a1.triples == a2.triples);
  CHECK(a1.dataset.train == a2.dataset.train);
  CHECK(a1.dataset.test == a2.dataset.test);
  a.seed = 43;
  CHECK(generate_affiliation_graph(a).triples != a1.triples);

  HierarchySynthConfig h;
  h.seed = 42;
  h.label_from_ancestor_prob = 0.5;
  const auto h1 = generate_hierarchy_graph(h), h2 = generate_hierarchy_graph(h);
  CHECK(h1.triples == h2.triples);
  CHECK(h1.dataset.train == h2.dataset.train);
  CHECK(h1.dataset.test == h2.dataset.test);
}

TEST_CASE("concept tree size", "[synth][hierarchy]") {
  HierarchySynthConfig cfg;
  cfg.concept_tree_depth = 2;
  cfg.branching = 2;
  cfg.lithogenesis_classes = 2;
  cfg.rock_units = 40;
  const auto r = generate_hierarchy_graph(cfg);
  check_graph_invariants(r);
  const auto concept_type = r.graph.find_symbol(bgs + "Concept");
  REQUIRE(concept_type);
  std::size_t concepts = 0;
  for (std::uint32_t n = 0; n < r.graph.node_count(); ++n) concepts += r.graph.has_type(NodeId{n}, *concept_type);
  CHECK(concepts == 7);
}

TEST_CASE("ancestor labels are recoverable through broader edges", "[synth][hierarchy]") {
  HierarchySynthConfig cfg;
  cfg.label_from_ancestor_prob = 1;
  const auto r = generate_hierarchy_graph(cfg);
  const auto& g = r.graph;
  for (const auto& x : r.dataset.test) {
    INFO(x.node);
    CHECK(targets(g, *g.find(x.node), bgs + "hasLithogenesis").empty());
    auto up = targets(g, *g.find(x.node), bgs + "broader");
    std::optional<std::string> found;
    while (!up.empty() && !found) {
      REQUIRE(up.size() == 1);
      const auto lith = targets(g, up[0], bgs + "hasLithogenesis");
      if (!lith.empty()) found = g.name(lith[0]);
      up = targets(g, up[0], bgs + "broader");
    }
    CHECK(found == x.label);
  }
}

TEST_CASE("concept tree edges are reciprocal", "[synth][hierarchy][property]") {
  const auto r = generate_hierarchy_graph(HierarchySynthConfig{});
  const auto& g = r.graph;
  std::set<std::pair<std::uint32_t, std::uint32_t>> broader, narrower;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& edge = g.edge(e);
    if (g.label(e) == bgs + "broader") broader.insert({edge.start.value, edge.end.value});
    if (g.label(e) == bgs + "narrower") narrower.insert({edge.end.value, edge.start.value});
  }
  CHECK(broader == narrower);
  CHECK_FALSE(broader.empty());
}

TEST_CASE("hierarchy labels: withheld for test units, stratified split", "[synth][hierarchy][property]") {
  for (const double p : {0.0, 0.5, 1.0}) {
    HierarchySynthConfig cfg;
    cfg.label_from_ancestor_prob = p;
    cfg.seed = 9;
    const auto r = generate_hierarchy_graph(cfg);
    check_graph_invariants(r);
    for (const auto& x : r.dataset.test) CHECK(label_edges(r.graph, x) == 0);
    for (const auto& x : r.dataset.train) CHECK(label_edges(r.graph, x) == 1);
    std::map<std::string, std::size_t> total, train;
    for (const auto& x : r.dataset.train) {
      ++total[x.label];
      ++train[x.label];
    }
    for (const auto& x : r.dataset.test) ++total[x.label];
    CHECK(total.size() == cfg.lithogenesis_classes);
    std::size_t units = 0;
    for (const auto& [label, n] : total) {
      units += n;
      CHECK(train[label] == std::max<std::size_t>(1, (n * 7 + 5) / 10));
    }
    CHECK(units == cfg.rock_units);
  }
}

TEST_CASE("invalid synthetic configurations", "[synth]") {
  auto affiliation = [](auto mutate) {
    AffiliationSynthConfig c;
    mutate(c);
    return c;
  };
  CHECK_THROWS_AS(generate_affiliation_graph(affiliation([](auto& c) { c.groups = 1; })), ValidationError);
  CHECK_THROWS_AS(generate_affiliation_graph(affiliation([](auto& c) { c.persons_per_group = 0; })), ValidationError);
  CHECK_THROWS_AS(generate_affiliation_graph(affiliation([](auto& c) { c.external_author_fraction = 1.5; })),
                  ValidationError);
  CHECK_THROWS_AS(generate_affiliation_graph(affiliation([](auto& c) { c.cross_group_pub_fraction = -0.1; })),
                  ValidationError);

  auto hierarchy = [](auto mutate) {
    HierarchySynthConfig c;
    mutate(c);
    return c;
  };
  CHECK_THROWS_AS(generate_hierarchy_graph(hierarchy([](auto& c) { c.concept_tree_depth = 1; })), ValidationError);
  CHECK_THROWS_AS(generate_hierarchy_graph(hierarchy([](auto& c) { c.lithogenesis_classes = 1; })), ValidationError);
  CHECK_THROWS_AS(generate_hierarchy_graph(hierarchy([](auto& c) { c.lithogenesis_classes = 5; })), ValidationError);
  // Two units cannot cover three classes.
  CHECK_THROWS_AS(generate_hierarchy_graph(hierarchy([](auto& c) { c.rock_units = 2; })), ValidationError);
  try {
    generate_hierarchy_graph(hierarchy([](auto& c) { c.rock_units = 2; }));
  } catch (const Error& e) {
    CHECK(e.stage() == Stage::synth);
  }
}
