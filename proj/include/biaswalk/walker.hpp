#pragma once

/// @file walker.hpp
/// Weighted random-walk corpus generation.
///
/// At a node with out-edges e_1..e_k the next edge is e_r with probability
/// weight(e_r) / sum_i weight(e_i). Every walk draws from its own generator
/// keyed by (seed, root, walk index), so the corpus does not depend on how
/// roots are distributed over worker threads.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <exception>
#include <mutex>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "biaswalk/error.hpp"
#include "biaswalk/graph.hpp"
#include "biaswalk/rng.hpp"

namespace biaswalk {

enum class DepthMode {
  /// Always attempt max_depth hops; truncate at sinks.
  fixed,
  /// Target depth drawn uniformly from {1, ..., max_depth} per walk.
  uniform,
};

inline std::string_view depth_mode_name(DepthMode m) { return m == DepthMode::fixed ? "fixed" : "uniform"; }

struct WalkConfig {
  std::uint32_t walks_per_node = 100;
  std::uint32_t max_depth = 4;
  DepthMode depth_mode = DepthMode::uniform;
  bool emit_edge_labels = true;
  std::uint64_t seed = 0;
  /// Worker threads; 0 picks hardware concurrency. Output is independent of it.
  unsigned workers = 1;
  /// Precompute every edge weight once instead of per visit.
  bool cache_weights = false;

  void validate() const {
    if (walks_per_node < 1) throw ValidationError(Stage::walk, "walks_per_node must be >= 1");
    if (max_depth < 1) throw ValidationError(Stage::walk, "max_depth must be >= 1");
  }
};

struct Walk {
  NodeId root;
  /// Traversed edges in order; hops.size() is the hop count.
  std::vector<EdgeIndex> hops;
};

struct WalkCorpus {
  std::vector<Walk> walks;
  bool emit_edge_labels = true;
};

template <class F>
concept EdgeWeightFunction = std::invocable<const F&, EdgeIndex> &&
                             std::convertible_to<std::invoke_result_t<const F&, EdgeIndex>, double>;

/// Draw an index with probability weights[i] / sum(weights). Consumes exactly
/// one 64-bit output of `rng`.
template <class Rng>
std::size_t sample_next_index(Rng& rng, std::span<const double> weights) {
  if (weights.empty()) throw ContractViolation("sample_next_index: no candidate edges");
  double total = 0;
  for (const double w : weights) {
    if (!(w > 0) || !std::isfinite(w)) throw ContractViolation("sample_next_index: weights must be positive and finite");
    total += w;
  }
  const double u = rng.uniform01() * total;
  double cumulative = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cumulative += weights[i];
    if (u < cumulative) return i;
  }
  return weights.size() - 1;
}

template <class Rng>
EdgeIndex sample_next_edge(Rng& rng, std::span<const EdgeIndex> out_edges, std::span<const double> weights) {
  if (out_edges.size() != weights.size()) throw ContractViolation("sample_next_edge: edges and weights differ in length");
  return out_edges[sample_next_index(rng, weights)];
}

namespace detail {

template <class WeightLookup>
void walks_from_root(const PropertyGraph& g, NodeId root, const WalkConfig& cfg, const WeightLookup& weight_of,
                     std::vector<double>& scratch, std::vector<Walk>& out) {
  if (g.out_degree(root) == 0) {
    out.push_back(Walk{root, {}});
    return;
  }
  for (std::uint32_t w = 0; w < cfg.walks_per_node; ++w) {
    auto rng = Xoshiro256::stream(cfg.seed, root.value, w);
    const std::uint32_t depth =
        cfg.depth_mode == DepthMode::fixed ? cfg.max_depth : 1 + static_cast<std::uint32_t>(rng.below(cfg.max_depth));
    Walk walk{root, {}};
    walk.hops.reserve(depth);
    NodeId cur = root;
    for (std::uint32_t hop = 0; hop < depth; ++hop) {
      const auto out_edges = g.out_edges(cur);
      if (out_edges.empty()) break;
      scratch.resize(out_edges.size());
      for (std::size_t i = 0; i < out_edges.size(); ++i) scratch[i] = weight_of(out_edges[i]);
      const EdgeIndex next = sample_next_edge(rng, out_edges, scratch);
      walk.hops.push_back(next);
      cur = g.edge(next).end;
    }
    out.push_back(std::move(walk));
  }
}

inline unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace detail

/// Up to walks_per_node walks rooted at every node, ordered by (root, walk
/// index). A root without out-edges contributes one single-token walk.
template <EdgeWeightFunction WeightFn>
WalkCorpus generate_walks(const PropertyGraph& g, const WeightFn& weight, const WalkConfig& cfg) {
  cfg.validate();
  if (g.empty()) throw ValidationError(Stage::walk, "cannot walk an empty graph");

  std::vector<double> cache;
  if (cfg.cache_weights) {
    cache.resize(g.edge_count());
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) cache[e] = static_cast<double>(weight(e));
  }
  auto lookup = [&](EdgeIndex e) -> double { return cfg.cache_weights ? cache[e] : static_cast<double>(weight(e)); };

  const std::size_t n = g.node_count();
  std::vector<std::vector<Walk>> per_root(n);
  std::atomic<std::size_t> next_root{0};
  constexpr std::size_t chunk = 64;

  auto work = [&] {
    std::vector<double> scratch;
    while (true) {
      const std::size_t begin = next_root.fetch_add(chunk);
      if (begin >= n) break;
      const std::size_t end = std::min(n, begin + chunk);
      for (std::size_t r = begin; r < end; ++r)
        detail::walks_from_root(g, NodeId{static_cast<std::uint32_t>(r)}, cfg, lookup, scratch, per_root[r]);
    }
  };

  const unsigned workers = std::min<std::size_t>(detail::resolve_workers(cfg.workers), (n + chunk - 1) / chunk);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        try {
          work();
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next_root.store(n);
        }
      });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

  WalkCorpus corpus;
  corpus.emit_edge_labels = cfg.emit_edge_labels;
  std::size_t total = 0;
  for (const auto& v : per_root) total += v.size();
  corpus.walks.reserve(total);
  for (auto& v : per_root)
    for (auto& w : v) corpus.walks.push_back(std::move(w));
  return corpus;
}

/// Corpus tokens contain no whitespace: space, tab, CR and LF are written
/// as the escapes \u0020, \u0009, \u000D and \u000A. IRIs pass through unchanged.
inline std::string escape_token(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case ' ': out += "\\u0020"; break;
      case '\t': out += "\\u0009"; break;
      case '\r': out += "\\u000D"; break;
      case '\n': out += "\\u000A"; break;
      default: out += c;
    }
  }
  return out;
}

/// Tokens of one walk: root name, then (edge label, node name) per hop, or
/// just node names when labels are off.
inline std::vector<std::string> walk_tokens(const PropertyGraph& g, const Walk& walk, bool emit_edge_labels) {
  std::vector<std::string> tokens;
  tokens.reserve(1 + walk.hops.size() * (emit_edge_labels ? 2 : 1));
  tokens.push_back(escape_token(g.name(walk.root)));
  for (const EdgeIndex e : walk.hops) {
    const Edge& edge = g.edge(e);
    if (emit_edge_labels) tokens.push_back(escape_token(g.symbol(edge.label)));
    tokens.push_back(escape_token(g.name(edge.end)));
  }
  return tokens;
}

/// One walk per line, tokens separated by a single space.
inline void write_corpus(const PropertyGraph& g, const WalkCorpus& corpus, std::ostream& out) {
  std::string line;
  for (const auto& walk : corpus.walks) {
    line.clear();
    for (const auto& tok : walk_tokens(g, walk, corpus.emit_edge_labels)) {
      if (!line.empty()) line += ' ';
      line += tok;
    }
    line += '\n';
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
  if (!out) throw Error(Stage::walk, "failed to write corpus");
}

/// Number of hops in the corpus whose edge label matches `label` exactly.
inline std::size_t count_hops_labeled(const PropertyGraph& g, const WalkCorpus& corpus, std::string_view label) {
  const auto id = g.find_symbol(label);
  if (!id) return 0;
  std::size_t n = 0;
  for (const auto& w : corpus.walks)
    for (const EdgeIndex e : w.hops) n += g.edge(e).label == *id ? 1 : 0;
  return n;
}

inline std::size_t count_hops(const WalkCorpus& corpus) {
  std::size_t n = 0;
  for (const auto& w : corpus.walks) n += w.hops.size();
  return n;
}

}  // namespace biaswalk
