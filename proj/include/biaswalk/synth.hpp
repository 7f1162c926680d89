#pragma once

/// @file synth.hpp
/// Small synthetic knowledge graphs with planted labels.
///
/// The affiliation generator mirrors a research-institute schema (persons,
/// groups, projects, topics, publications) with the group as the class. The
/// hierarchy generator mirrors a geological vocabulary: a broader/narrower
/// concept tree, rock units hanging off its leaves and a lithogenesis class.
/// Label-bearing edges of test nodes are never emitted.

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "biaswalk/error.hpp"
#include "biaswalk/evaluator.hpp"
#include "biaswalk/graph.hpp"
#include "biaswalk/ntriples.hpp"
#include "biaswalk/rng.hpp"

namespace biaswalk {

struct SynthResult {
  /// Type triples for every node first, then edge triples.
  std::vector<Triple> triples;
  PropertyGraph graph;
  LabeledDataset dataset;
};

struct AffiliationSynthConfig {
  std::uint32_t groups = 4;
  std::uint32_t persons_per_group = 30;
  std::uint32_t projects_per_group = 3;
  std::uint32_t topics_per_group = 2;
  std::uint32_t publications = 240;
  /// Probability that a publication gets an extra author from outside every group.
  double external_author_fraction = 0.5;
  /// Probability that a publication's second author comes from another group.
  double cross_group_pub_fraction = 0.5;
  /// Size of the shared pool of external authors.
  std::uint32_t external_authors = 10;
  std::uint64_t seed = 1;

  void validate() const {
    if (groups < 2) throw ValidationError(Stage::synth, "groups must be >= 2");
    if (persons_per_group < 1) throw ValidationError(Stage::synth, "persons_per_group must be >= 1");
    if (projects_per_group < 1) throw ValidationError(Stage::synth, "projects_per_group must be >= 1");
    if (topics_per_group < 1) throw ValidationError(Stage::synth, "topics_per_group must be >= 1");
    if (!(external_author_fraction >= 0 && external_author_fraction <= 1))
      throw ValidationError(Stage::synth, "external_author_fraction must be in [0, 1]");
    if (!(cross_group_pub_fraction >= 0 && cross_group_pub_fraction <= 1))
      throw ValidationError(Stage::synth, "cross_group_pub_fraction must be in [0, 1]");
    if (external_author_fraction > 0 && publications > 0 && external_authors < 1)
      throw ValidationError(Stage::synth, "external_authors must be >= 1 when external authorship is enabled");
  }
};

struct HierarchySynthConfig {
  std::uint32_t concept_tree_depth = 3;
  std::uint32_t branching = 3;
  std::uint32_t rock_units = 240;
  std::uint32_t lithogenesis_classes = 3;
  double label_from_ancestor_prob = 1.0;
  /// Attribute links per rock unit to values shared across all classes.
  std::uint32_t noise_links_per_unit = 4;
  std::uint32_t attribute_values = 12;
  std::uint64_t seed = 1;

  void validate() const {
    if (concept_tree_depth < 2) throw ValidationError(Stage::synth, "concept_tree_depth must be >= 2");
    if (branching < 1) throw ValidationError(Stage::synth, "branching must be >= 1");
    if (rock_units < 1) throw ValidationError(Stage::synth, "rock_units must be >= 1");
    if (lithogenesis_classes < 2) throw ValidationError(Stage::synth, "lithogenesis_classes must be >= 2");
    if (!(label_from_ancestor_prob >= 0 && label_from_ancestor_prob <= 1))
      throw ValidationError(Stage::synth, "label_from_ancestor_prob must be in [0, 1]");
    if (noise_links_per_unit > 0 && attribute_values < 1)
      throw ValidationError(Stage::synth, "attribute_values must be >= 1 when noise links are enabled");
  }
};

namespace detail {

/// Collects type triples and edge triples separately so every node is
/// introduced by its type triple before any edge mentions it.
class TripleSink {
 public:
  void type(const std::string& node, const std::string& type) {
    types_.push_back(Triple{node, std::string(rdf_type_iri), Iri{type}});
  }
  void edge(const std::string& s, const std::string& p, const std::string& o) {
    edges_.push_back(Triple{s, p, Iri{o}});
  }
  std::vector<Triple> take() && {
    types_.insert(types_.end(), std::make_move_iterator(edges_.begin()), std::make_move_iterator(edges_.end()));
    return std::move(types_);
  }

 private:
  std::vector<Triple> types_;
  std::vector<Triple> edges_;
};

template <class T>
void shuffle_in_place(std::vector<T>& v, Xoshiro256& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

/// Seeded 70/30 split of one class of `n` members: flags[i] is true for
/// train members. At least one member goes to train.
inline std::vector<bool> split_class(std::size_t n, Xoshiro256& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  shuffle_in_place(order, rng);
  const std::size_t n_train = std::max<std::size_t>(1, (n * 7 + 5) / 10);
  std::vector<bool> flags(n, false);
  for (std::size_t i = 0; i < n_train && i < n; ++i) flags[order[i]] = true;
  return flags;
}

inline SynthResult finish(TripleSink&& sink, LabeledDataset&& dataset) {
  SynthResult r;
  r.triples = std::move(sink).take();
  r.graph = build_graph(r.triples);
  r.dataset = std::move(dataset);
  r.dataset.validate();
  return r;
}

}  // namespace detail

inline constexpr std::string_view affiliation_ns = "http://example.org/aifb/";
inline constexpr std::string_view hierarchy_ns = "http://example.org/bgs/";

/// Persons, projects and topics belong to one group each. Train persons are
/// linked to their group by `affiliation` and `member`; test persons are not.
/// Every person works at one project of their group. Publications have a
/// first author from a home group, a second author from another group with
/// probability cross_group_pub_fraction, and an external author with
/// probability external_author_fraction.
inline SynthResult generate_affiliation_graph(const AffiliationSynthConfig& cfg) {
  cfg.validate();
  const std::string ns(affiliation_ns);
  const std::string t_person = ns + "Person", t_group = ns + "ResearchGroup", t_project = ns + "Project",
                    t_topic = ns + "ResearchTopic", t_pub = ns + "Publication";
  const std::string p_affiliation = ns + "affiliation", p_member = ns + "member",
                    p_works = ns + "worksAtProject", p_worked_by = ns + "isWorkedOnBy", p_about = ns + "isAbout",
                    p_publication = ns + "publication", p_author = ns + "author";

  Xoshiro256 rng(cfg.seed);
  detail::TripleSink sink;
  LabeledDataset dataset;

  const auto G = cfg.groups, P = cfg.persons_per_group;
  auto group_iri = [&](std::uint32_t g) { return ns + "group/g" + std::to_string(g); };
  auto person_iri = [&](std::uint32_t g, std::uint32_t p) {
    return ns + "person/g" + std::to_string(g) + "-p" + std::to_string(p);
  };
  auto project_iri = [&](std::uint32_t g, std::uint32_t j) {
    return ns + "project/g" + std::to_string(g) + "-j" + std::to_string(j);
  };
  auto topic_iri = [&](std::uint32_t g, std::uint32_t t) {
    return ns + "topic/g" + std::to_string(g) + "-t" + std::to_string(t);
  };

  for (std::uint32_t g = 0; g < G; ++g) {
    sink.type(group_iri(g), t_group);
    for (std::uint32_t p = 0; p < P; ++p) sink.type(person_iri(g, p), t_person);
    for (std::uint32_t j = 0; j < cfg.projects_per_group; ++j) sink.type(project_iri(g, j), t_project);
    for (std::uint32_t t = 0; t < cfg.topics_per_group; ++t) sink.type(topic_iri(g, t), t_topic);
  }

  std::vector<std::vector<bool>> train_flags;
  for (std::uint32_t g = 0; g < G; ++g) {
    train_flags.push_back(detail::split_class(P, rng));
    for (std::uint32_t p = 0; p < P; ++p)
      (train_flags[g][p] ? dataset.train : dataset.test).push_back(LabeledNode{person_iri(g, p), group_iri(g)});
  }

  for (std::uint32_t g = 0; g < G; ++g) {
    for (std::uint32_t j = 0; j < cfg.projects_per_group; ++j)
      sink.edge(project_iri(g, j), p_about, topic_iri(g, static_cast<std::uint32_t>(rng.below(cfg.topics_per_group))));
    for (std::uint32_t p = 0; p < P; ++p) {
      const std::string person = person_iri(g, p);
      if (train_flags[g][p]) {
        sink.edge(person, p_affiliation, group_iri(g));
        sink.edge(group_iri(g), p_member, person);
      }
      const std::string project = project_iri(g, static_cast<std::uint32_t>(rng.below(cfg.projects_per_group)));
      sink.edge(person, p_works, project);
      sink.edge(project, p_worked_by, person);
    }
  }

  auto author = [&](const std::string& person, const std::string& pub) {
    sink.edge(person, p_publication, pub);
    sink.edge(pub, p_author, person);
  };
  for (std::uint32_t e = 0; e < cfg.external_authors && cfg.publications > 0 && cfg.external_author_fraction > 0; ++e)
    sink.type(ns + "person/external-e" + std::to_string(e), t_person);
  for (std::uint32_t n = 0; n < cfg.publications; ++n) {
    const std::string pub = ns + "publication/n" + std::to_string(n);
    sink.type(pub, t_pub);
    const auto home = static_cast<std::uint32_t>(rng.below(G));
    const auto first = static_cast<std::uint32_t>(rng.below(P));
    author(person_iri(home, first), pub);
    if (rng.chance(cfg.cross_group_pub_fraction)) {
      const auto other = static_cast<std::uint32_t>((home + 1 + rng.below(G - 1)) % G);
      author(person_iri(other, static_cast<std::uint32_t>(rng.below(P))), pub);
    } else if (P > 1) {
      const auto second = static_cast<std::uint32_t>((first + 1 + rng.below(P - 1)) % P);
      author(person_iri(home, second), pub);
    }
    if (rng.chance(cfg.external_author_fraction))
      author(ns + "person/external-e" + std::to_string(rng.below(cfg.external_authors)), pub);
  }

  return detail::finish(std::move(sink), std::move(dataset));
}

/// A concept tree of the given depth and branching below a single root, with
/// reciprocal `broader`/`narrower` edges and `inScheme` links to a scheme
/// node. Depth-1 subtree i carries lithogenesis class i mod C. Rock units
/// are attached below random leaves (unit `broader` leaf, leaf `narrower`
/// unit) and link to shared attribute values. Train units and, with
/// probability label_from_ancestor_prob, each non-root concept have a
/// `hasLithogenesis` edge to their class.
inline SynthResult generate_hierarchy_graph(const HierarchySynthConfig& cfg) {
  cfg.validate();
  if (cfg.branching < cfg.lithogenesis_classes)
    throw ValidationError(Stage::synth, "branching must be >= lithogenesis_classes or some class has no concepts");
  const std::string ns(hierarchy_ns);
  const std::string t_concept = ns + "Concept", t_scheme = ns + "ConceptScheme", t_unit = ns + "NamedRockUnit",
                    t_class = ns + "Lithogenesis", t_value = ns + "AttributeValue";
  const std::string p_broader = ns + "broader", p_narrower = ns + "narrower", p_in_scheme = ns + "inScheme",
                    p_lith = ns + "hasLithogenesis", p_attr = ns + "hasAttribute", p_attr_of = ns + "attributeOf";

  Xoshiro256 rng(cfg.seed);
  detail::TripleSink sink;
  LabeledDataset dataset;

  const std::string scheme = ns + "scheme";
  sink.type(scheme, t_scheme);
  auto class_iri = [&](std::uint32_t c) { return ns + "lithogenesis/c" + std::to_string(c); };
  for (std::uint32_t c = 0; c < cfg.lithogenesis_classes; ++c) sink.type(class_iri(c), t_class);

  struct Concept {
    std::string iri;
    std::int64_t parent;
    std::uint32_t cls;
  };
  std::vector<Concept> concepts{{ns + "concept/r", -1, 0}};
  std::vector<std::size_t> level{0};
  for (std::uint32_t d = 1; d <= cfg.concept_tree_depth; ++d) {
    std::vector<std::size_t> next;
    for (const std::size_t parent : level) {
      for (std::uint32_t b = 0; b < cfg.branching; ++b) {
        const std::uint32_t cls = d == 1 ? b % cfg.lithogenesis_classes : concepts[parent].cls;
        concepts.push_back({concepts[parent].iri + "-" + std::to_string(b), static_cast<std::int64_t>(parent), cls});
        next.push_back(concepts.size() - 1);
      }
    }
    level = std::move(next);
  }
  const std::vector<std::size_t>& leaves = level;
  for (const auto& c : concepts) sink.type(c.iri, t_concept);

  std::vector<std::string> values;
  for (std::uint32_t v = 0; v < cfg.attribute_values && cfg.noise_links_per_unit > 0; ++v) {
    values.push_back(ns + "attribute/v" + std::to_string(v));
    sink.type(values.back(), t_value);
  }

  std::vector<std::string> units;
  std::vector<std::size_t> unit_leaf;
  std::vector<std::vector<std::size_t>> by_class(cfg.lithogenesis_classes);
  for (std::uint32_t u = 0; u < cfg.rock_units; ++u) {
    units.push_back(ns + "unit/u" + std::to_string(u));
    sink.type(units.back(), t_unit);
    unit_leaf.push_back(leaves[rng.below(leaves.size())]);
    by_class[concepts[unit_leaf.back()].cls].push_back(u);
  }
  std::vector<bool> unit_train(units.size(), false);
  for (std::uint32_t c = 0; c < cfg.lithogenesis_classes; ++c) {
    if (by_class[c].empty())
      throw ValidationError(Stage::synth, "lithogenesis class " + std::to_string(c) + " has no rock units");
    const auto flags = detail::split_class(by_class[c].size(), rng);
    for (std::size_t i = 0; i < by_class[c].size(); ++i) {
      const std::size_t u = by_class[c][i];
      unit_train[u] = flags[i];
      (flags[i] ? dataset.train : dataset.test).push_back(LabeledNode{units[u], class_iri(c)});
    }
  }

  for (std::size_t i = 0; i < concepts.size(); ++i) {
    const auto& c = concepts[i];
    sink.edge(c.iri, p_in_scheme, scheme);
    if (c.parent >= 0) {
      const auto& parent = concepts[static_cast<std::size_t>(c.parent)];
      sink.edge(c.iri, p_broader, parent.iri);
      sink.edge(parent.iri, p_narrower, c.iri);
      if (rng.chance(cfg.label_from_ancestor_prob)) sink.edge(c.iri, p_lith, class_iri(c.cls));
    }
  }
  for (std::size_t u = 0; u < units.size(); ++u) {
    const auto& leaf = concepts[unit_leaf[u]];
    sink.edge(units[u], p_broader, leaf.iri);
    sink.edge(leaf.iri, p_narrower, units[u]);
    if (unit_train[u]) sink.edge(units[u], p_lith, class_iri(leaf.cls));
    for (std::uint32_t k = 0; k < cfg.noise_links_per_unit; ++k) {
      const std::string& value = values[rng.below(values.size())];
      sink.edge(units[u], p_attr, value);
      sink.edge(value, p_attr_of, units[u]);
    }
  }

  return detail::finish(std::move(sink), std::move(dataset));
}

}  // namespace biaswalk
