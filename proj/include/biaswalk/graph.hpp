#pragma once

/// @file graph.hpp
/// Immutable directed property multigraph built from RDF triples, plus the
/// graph-wide label and in-degree statistics used by the frequency-based
/// weighting strategies.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "biaswalk/error.hpp"
#include "biaswalk/ntriples.hpp"

namespace biaswalk {

inline constexpr std::string_view rdf_type_iri = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

/// Interned node identifier. Dense in [0, node_count).
struct NodeId {
  std::uint32_t value = 0;

  friend auto operator<=>(NodeId, NodeId) = default;
};

/// Interned symbol: edge labels and node type names share one table.
using LabelId = std::uint32_t;
using EdgeIndex = std::uint32_t;

struct Edge {
  NodeId start;
  LabelId label = 0;
  NodeId end;

  friend bool operator==(const Edge&, const Edge&) = default;
};

enum class NodeKind : std::uint8_t { iri = 0, literal = 1 };

enum class LiteralPolicy { drop, as_terminal_node };

namespace detail {

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
};

using StringIndex = std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>>;

}  // namespace detail

class GraphBuilder;

class PropertyGraph {
 public:
  PropertyGraph() = default;

  std::size_t node_count() const noexcept { return names_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::size_t symbol_count() const noexcept { return symbols_.size(); }
  bool empty() const noexcept { return names_.empty(); }

  /// IRI of an IRI node, or the N-Triples form of a literal node.
  const std::string& name(NodeId n) const { return names_.at(n.value); }
  NodeKind kind(NodeId n) const { return kinds_.at(n.value); }
  /// Parsed literal for literal nodes; nullptr for IRI nodes.
  const Literal* literal(NodeId n) const {
    const auto it = literals_.find(n.value);
    return it == literals_.end() ? nullptr : &it->second;
  }

  std::optional<NodeId> find(std::string_view name) const {
    const auto it = node_index_.find(name);
    if (it == node_index_.end()) return std::nullopt;
    return NodeId{it->second};
  }

  const std::string& symbol(LabelId id) const { return symbols_.at(id); }
  std::optional<LabelId> find_symbol(std::string_view s) const {
    const auto it = symbol_index_.find(s);
    if (it == symbol_index_.end()) return std::nullopt;
    return it->second;
  }

  /// Sorted, de-duplicated type symbols of a node.
  std::span<const LabelId> types(NodeId n) const {
    const auto b = type_offsets_.at(n.value);
    const auto e = type_offsets_.at(n.value + 1);
    return std::span<const LabelId>(type_ids_).subspan(b, e - b);
  }

  bool has_type(NodeId n, LabelId type) const {
    const auto t = types(n);
    return std::binary_search(t.begin(), t.end(), type);
  }

  std::span<const Edge> edges() const noexcept { return edges_; }
  const Edge& edge(EdgeIndex e) const { return edges_.at(e); }
  const std::string& label(EdgeIndex e) const { return symbols_[edges_.at(e).label]; }

  /// Indices of edges whose start is `n`, in insertion order.
  std::span<const EdgeIndex> out_edges(NodeId n) const {
    const auto b = out_offsets_.at(n.value);
    const auto e = out_offsets_.at(n.value + 1);
    return std::span<const EdgeIndex>(out_ids_).subspan(b, e - b);
  }

  std::size_t out_degree(NodeId n) const { return out_edges(n).size(); }

 private:
  friend class GraphBuilder;

  std::vector<std::string> names_;
  std::vector<NodeKind> kinds_;
  std::unordered_map<std::uint32_t, Literal> literals_;
  detail::StringIndex node_index_;

  std::vector<std::string> symbols_;
  detail::StringIndex symbol_index_;

  std::vector<std::uint32_t> type_offsets_{0};
  std::vector<LabelId> type_ids_;

  std::vector<Edge> edges_;
  std::vector<std::uint32_t> out_offsets_{0};
  std::vector<EdgeIndex> out_ids_;
};

/// Accumulates nodes, types and edges, then freezes them into a
/// PropertyGraph. Node and edge ids follow insertion order.
class GraphBuilder {
 public:
  NodeId add_node(std::string_view name) {
    if (const auto it = g_.node_index_.find(name); it != g_.node_index_.end()) return NodeId{it->second};
    const auto id = static_cast<std::uint32_t>(g_.names_.size());
    g_.names_.emplace_back(name);
    g_.kinds_.push_back(NodeKind::iri);
    g_.node_index_.emplace(std::string(name), id);
    pending_types_.emplace_back();
    return NodeId{id};
  }

  NodeId add_literal_node(const Literal& lit) {
    const std::string name = format_literal(lit);
    if (const auto it = g_.node_index_.find(name); it != g_.node_index_.end()) return NodeId{it->second};
    const NodeId id = add_node(name);
    g_.kinds_[id.value] = NodeKind::literal;
    g_.literals_.emplace(id.value, lit);
    return id;
  }

  LabelId intern_symbol(std::string_view s) {
    if (const auto it = g_.symbol_index_.find(s); it != g_.symbol_index_.end()) return it->second;
    const auto id = static_cast<LabelId>(g_.symbols_.size());
    g_.symbols_.emplace_back(s);
    g_.symbol_index_.emplace(std::string(s), id);
    return id;
  }

  void add_type(NodeId n, std::string_view type) { add_type(n, intern_symbol(type)); }
  void add_type(NodeId n, LabelId type) {
    if (type >= g_.symbols_.size()) throw ContractViolation("add_type: unknown symbol id");
    pending_types_.at(n.value).push_back(type);
  }

  EdgeIndex add_edge(NodeId start, std::string_view label, NodeId end) {
    return add_edge(start, intern_symbol(label), end);
  }
  EdgeIndex add_edge(NodeId start, LabelId label, NodeId end) {
    if (start.value >= g_.names_.size() || end.value >= g_.names_.size()) {
      throw ContractViolation("add_edge: endpoint is not a node of this graph");
    }
    if (label >= g_.symbols_.size()) throw ContractViolation("add_edge: unknown symbol id");
    const auto idx = static_cast<EdgeIndex>(g_.edges_.size());
    g_.edges_.push_back(Edge{start, label, end});
    return idx;
  }

  PropertyGraph build() && {
    const std::size_t n = g_.names_.size();
    g_.type_offsets_.assign(1, 0);
    g_.type_ids_.clear();
    for (auto& ts : pending_types_) {
      std::sort(ts.begin(), ts.end());
      ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
      g_.type_ids_.insert(g_.type_ids_.end(), ts.begin(), ts.end());
      g_.type_offsets_.push_back(static_cast<std::uint32_t>(g_.type_ids_.size()));
    }

    // Counting sort keeps each adjacency list in edge insertion order.
    g_.out_offsets_.assign(n + 1, 0);
    for (const auto& e : g_.edges_) ++g_.out_offsets_[e.start.value + 1];
    for (std::size_t i = 0; i < n; ++i) g_.out_offsets_[i + 1] += g_.out_offsets_[i];
    g_.out_ids_.assign(g_.edges_.size(), 0);
    std::vector<std::uint32_t> cursor(g_.out_offsets_.begin(), g_.out_offsets_.end() - 1);
    for (EdgeIndex i = 0; i < g_.edges_.size(); ++i) g_.out_ids_[cursor[g_.edges_[i].start.value]++] = i;

    pending_types_.clear();
    return std::move(g_);
  }

 private:
  PropertyGraph g_;
  std::vector<std::vector<LabelId>> pending_types_;
};

struct BuildOptions {
  std::set<std::string, std::less<>> type_predicates{std::string(rdf_type_iri)};
  LiteralPolicy literals = LiteralPolicy::drop;
};

/// Materialize the walkable graph. Type-predicate triples populate the
/// subject's types and create no edge; literal objects follow the policy.
inline PropertyGraph build_graph(std::span<const Triple> triples, const BuildOptions& options = {}) {
  if (options.type_predicates.empty()) throw ContractViolation("build_graph: type_predicates must be non-empty");
  GraphBuilder b;
  for (const auto& t : triples) {
    const NodeId s = b.add_node(t.subject);
    if (options.type_predicates.contains(t.predicate)) {
      if (const auto* iri = std::get_if<Iri>(&t.object)) b.add_type(s, iri->value);
      else b.add_type(s, std::get<Literal>(t.object).lexical);
      continue;
    }
    if (const auto* iri = std::get_if<Iri>(&t.object)) {
      const NodeId o = b.add_node(iri->value);
      b.add_edge(s, t.predicate, o);
    } else if (options.literals == LiteralPolicy::as_terminal_node) {
      const NodeId o = b.add_literal_node(std::get<Literal>(t.object));
      b.add_edge(s, t.predicate, o);
    }
  }
  return std::move(b).build();
}

/// Serialize back to triples: one type triple per (node, type), then one
/// triple per edge. Nodes with neither types nor edges are not representable.
inline std::vector<Triple> to_triples(const PropertyGraph& g, std::string_view type_predicate = rdf_type_iri) {
  std::vector<Triple> out;
  out.reserve(g.edge_count());
  for (std::uint32_t i = 0; i < g.node_count(); ++i) {
    const NodeId n{i};
    if (g.kind(n) != NodeKind::iri) continue;
    for (const LabelId t : g.types(n)) out.push_back(Triple{g.name(n), std::string(type_predicate), Iri{g.symbol(t)}});
  }
  for (const auto& e : g.edges()) {
    Object obj;
    if (const Literal* lit = g.literal(e.end)) obj = *lit;
    else obj = Iri{g.name(e.end)};
    out.push_back(Triple{g.name(e.start), g.symbol(e.label), std::move(obj)});
  }
  return out;
}

/// Edge-label frequencies and node in-degrees, indexed by id.
struct GraphStats {
  /// Indexed by LabelId. Type-only symbols have count 0.
  std::vector<std::size_t> predicate_freq;
  /// Indexed by NodeId.
  std::vector<std::size_t> in_degree;

  /// Named view: label string -> count, labels with zero count omitted.
  std::map<std::string, std::size_t> predicate_frequencies(const PropertyGraph& g) const {
    std::map<std::string, std::size_t> out;
    for (LabelId l = 0; l < predicate_freq.size(); ++l)
      if (predicate_freq[l] > 0) out.emplace(g.symbol(l), predicate_freq[l]);
    return out;
  }

  /// Named view: node name -> in-degree, nodes with zero in-degree omitted.
  std::map<std::string, std::size_t> in_degrees(const PropertyGraph& g) const {
    std::map<std::string, std::size_t> out;
    for (std::uint32_t n = 0; n < in_degree.size(); ++n)
      if (in_degree[n] > 0) out.emplace(g.name(NodeId{n}), in_degree[n]);
    return out;
  }
};

inline GraphStats compute_stats(const PropertyGraph& g) {
  GraphStats s;
  s.predicate_freq.assign(g.symbol_count(), 0);
  s.in_degree.assign(g.node_count(), 0);
  for (const auto& e : g.edges()) {
    ++s.predicate_freq[e.label];
    ++s.in_degree[e.end.value];
  }
  return s;
}

}  // namespace biaswalk
