#pragma once

/// @file weighting.hpp
/// Edge-weighting functions. A weight function maps every edge to a strictly
/// positive real; the walker turns weights into transition probabilities by
/// normalizing over the current node's out-edges.
///
/// Two families are provided:
///
///  - builtin structural strategies (uniform, predicate/object frequency and
///    their inverses) that need graph-wide statistics, and
///  - ordered first-match rule sets that look only at the edge label, the
///    end node's types, and the start node's out-edge labels.
///
/// Rule file format, one directive per line; a `#` at the start of a token
/// begins a comment:
///
///     param w_low=0.1
///     param w_high=10
///     rule edge-label member,affiliation weight=w_high
///     rule end-node-type Publication not weight=0.5
///     rule start-has-out-edge broader weight=w_low
///     rule always weight=1
///     default weight=w_low
///
/// Rules are evaluated top to bottom and the first match wins; `default` must
/// be the last directive. `weight=` takes a number or a declared param name.
/// Label and type arguments match either the full IRI or its local name (the
/// part after the last `#` or `/`).

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "biaswalk/error.hpp"
#include "biaswalk/graph.hpp"

namespace biaswalk {

enum class Strategy { uniform, predicate_freq, inv_predicate_freq, object_freq, inv_object_freq };

inline std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::uniform: return "uniform";
    case Strategy::predicate_freq: return "predicate-freq";
    case Strategy::inv_predicate_freq: return "inv-predicate-freq";
    case Strategy::object_freq: return "object-freq";
    case Strategy::inv_object_freq: return "inv-object-freq";
  }
  return "?";
}

inline std::optional<Strategy> parse_strategy(std::string_view name) {
  for (const auto s : {Strategy::uniform, Strategy::predicate_freq, Strategy::inv_predicate_freq,
                       Strategy::object_freq, Strategy::inv_object_freq}) {
    if (strategy_name(s) == name) return s;
  }
  return std::nullopt;
}

/// Weight of `edge` under a structural strategy. `stats` must come from the
/// graph the edge belongs to.
inline double builtin_weight(Strategy strategy, const Edge& edge, const GraphStats& stats) {
  if (strategy == Strategy::uniform) return 1.0;
  if (strategy == Strategy::predicate_freq || strategy == Strategy::inv_predicate_freq) {
    if (edge.label >= stats.predicate_freq.size() || stats.predicate_freq[edge.label] == 0)
      throw ContractViolation("builtin_weight: edge label missing from graph statistics");
    const auto f = static_cast<double>(stats.predicate_freq[edge.label]);
    return strategy == Strategy::predicate_freq ? f : 1.0 / f;
  }
  if (edge.end.value >= stats.in_degree.size() || stats.in_degree[edge.end.value] == 0)
    throw ContractViolation("builtin_weight: edge end node missing from graph statistics");
  const auto d = static_cast<double>(stats.in_degree[edge.end.value]);
  return strategy == Strategy::object_freq ? d : 1.0 / d;
}

/// Three-level hyperparameters of the domain-specific strategies.
struct WeightParams {
  double low = 0.1;
  double mid = 1.0;
  double high = 10.0;

  /// Requires 0 < low < high, and low < mid < high when the mid level is used.
  void validate(bool uses_mid) const {
    if (!(low > 0) || !std::isfinite(high)) throw ValidationError(Stage::weighting, "weights must be positive and finite");
    if (uses_mid) {
      if (!(low < mid && mid < high)) throw ValidationError(Stage::weighting, "require 0 < w_low < w < w_high");
    } else if (!(low < high)) {
      throw ValidationError(Stage::weighting, "require 0 < w_low < w_high");
    }
  }
};

/// Local name of an IRI: the suffix after the last '#' or '/'.
inline std::string_view local_name(std::string_view iri) {
  const auto pos = iri.find_last_of("#/");
  if (pos == std::string_view::npos || pos + 1 == iri.size()) return iri;
  return iri.substr(pos + 1);
}

/// True when `pattern` names `symbol` either exactly or by local name.
inline bool symbol_matches(std::string_view symbol, std::string_view pattern) {
  return symbol == pattern || local_name(symbol) == pattern;
}

struct EdgeLabelIn {
  std::vector<std::string> labels;
};
struct EndNodeTypeIn {
  std::vector<std::string> types;
};
/// Matches when the edge's start node has at least one out-edge with the label.
struct StartNodeHasOutEdgeLabeled {
  std::string label;
};
struct Always {};

using Matcher = std::variant<EdgeLabelIn, EndNodeTypeIn, StartNodeHasOutEdgeLabeled, Always>;

struct WeightRule {
  Matcher matcher;
  bool negate = false;
  double weight = 1.0;
};

struct WeightRuleSet {
  std::vector<WeightRule> rules;
  double default_weight = 1.0;
  /// Declared params after overrides, for reporting.
  std::map<std::string, double> params;

  void validate() const {
    auto check = [](double w, const std::string& where) {
      if (!(w > 0) || !std::isfinite(w))
        throw ValidationError(Stage::weighting, where + ": weight must be a positive finite number");
    };
    for (std::size_t i = 0; i < rules.size(); ++i) check(rules[i].weight, "rule " + std::to_string(i + 1));
    check(default_weight, "default");
  }
};

namespace detail {

inline bool matches_any(std::string_view symbol, const std::vector<std::string>& patterns) {
  for (const auto& p : patterns)
    if (symbol_matches(symbol, p)) return true;
  return false;
}

inline bool matcher_holds(const Matcher& m, const Edge& edge, const PropertyGraph& g) {
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, EdgeLabelIn>) {
          return matches_any(g.symbol(edge.label), x.labels);
        } else if constexpr (std::is_same_v<T, EndNodeTypeIn>) {
          for (const LabelId t : g.types(edge.end))
            if (matches_any(g.symbol(t), x.types)) return true;
          return false;
        } else if constexpr (std::is_same_v<T, StartNodeHasOutEdgeLabeled>) {
          for (const EdgeIndex e : g.out_edges(edge.start))
            if (symbol_matches(g.label(e), x.label)) return true;
          return false;
        } else {
          return true;
        }
      },
      m);
}

}  // namespace detail

/// Weight of the first rule whose (possibly negated) matcher holds, else the
/// default. Resolves names against the graph on every call; see BoundRuleSet
/// for the precompiled form used by the walker.
inline double evaluate_rules(const WeightRuleSet& rules, const Edge& edge, const PropertyGraph& g) {
  for (const auto& r : rules.rules)
    if (detail::matcher_holds(r.matcher, edge, g) != r.negate) return r.weight;
  return rules.default_weight;
}

/// Rule set compiled against one graph: label and type names become symbol
/// masks so evaluation does no string comparisons.
class BoundRuleSet {
 public:
  BoundRuleSet(const WeightRuleSet& rules, const PropertyGraph& g) : graph_(&g), default_weight_(rules.default_weight) {
    rules.validate();
    for (const auto& r : rules.rules) {
      Compiled c;
      c.negate = r.negate;
      c.weight = r.weight;
      c.mask.assign(g.symbol_count(), false);
      std::visit(
          [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            auto mark = [&](const std::vector<std::string>& patterns) {
              for (LabelId s = 0; s < g.symbol_count(); ++s) c.mask[s] = detail::matches_any(g.symbol(s), patterns);
            };
            if constexpr (std::is_same_v<T, EdgeLabelIn>) {
              c.kind = Kind::edge_label;
              mark(x.labels);
            } else if constexpr (std::is_same_v<T, EndNodeTypeIn>) {
              c.kind = Kind::end_type;
              mark(x.types);
            } else if constexpr (std::is_same_v<T, StartNodeHasOutEdgeLabeled>) {
              c.kind = Kind::start_out_label;
              mark({x.label});
            } else {
              c.kind = Kind::always;
            }
          },
          r.matcher);
      compiled_.push_back(std::move(c));
    }
  }

  double operator()(EdgeIndex e) const {
    const PropertyGraph& g = *graph_;
    const Edge& edge = g.edge(e);
    for (const auto& c : compiled_) {
      bool hit = false;
      switch (c.kind) {
        case Kind::edge_label: hit = c.mask[edge.label]; break;
        case Kind::end_type:
          for (const LabelId t : g.types(edge.end))
            if (c.mask[t]) { hit = true; break; }
          break;
        case Kind::start_out_label:
          for (const EdgeIndex o : g.out_edges(edge.start))
            if (c.mask[g.edge(o).label]) { hit = true; break; }
          break;
        case Kind::always: hit = true; break;
      }
      if (hit != c.negate) return c.weight;
    }
    return default_weight_;
  }

 private:
  enum class Kind { edge_label, end_type, start_out_label, always };
  struct Compiled {
    Kind kind = Kind::always;
    bool negate = false;
    double weight = 1.0;
    std::vector<bool> mask;
  };

  const PropertyGraph* graph_;
  double default_weight_;
  std::vector<Compiled> compiled_;
};

/// Param overrides applied while loading a rule file, e.g. {"w_low", 1e-6}.
using ParamOverrides = std::map<std::string, double, std::less<>>;

namespace detail {

inline std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.emplace_back(line.substr(start, i - start));
  }
  return out;
}

inline std::optional<double> parse_number(std::string_view s) {
  double v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

inline std::vector<std::string> split_commas(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto pos = s.find(',', start);
    const auto piece = s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    if (!piece.empty()) out.emplace_back(piece);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Populate WeightParams from conventional param names, if all are declared.
inline void validate_declared_params(const std::map<std::string, double>& params) {
  const auto low = params.find("w_low");
  const auto high = params.find("w_high");
  if (low == params.end() || high == params.end()) return;
  WeightParams wp{low->second, 0, high->second};
  auto mid = params.find("w");
  if (mid == params.end()) mid = params.find("w_mid");
  if (mid != params.end()) wp.mid = mid->second;
  wp.validate(mid != params.end());
}

}  // namespace detail

/// Parse and validate rule-file text. Overrides replace declared params;
/// overriding an undeclared param is an error.
inline WeightRuleSet load_ruleset(std::string_view text, const ParamOverrides& overrides = {}) {
  WeightRuleSet set;
  bool have_default = false;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;

  auto fail = [&](const std::string& reason) -> ParseError { return ParseError(Stage::weighting, line_no, raw, reason); };
  auto resolve_weight = [&](std::string_view tok) -> double {
    if (tok.substr(0, 7) != "weight=") throw fail("expected weight=<value>");
    const auto value = tok.substr(7);
    if (auto v = detail::parse_number(value)) {
      if (!(*v > 0) || !std::isfinite(*v)) throw ValidationError(Stage::weighting, "line " + std::to_string(line_no) + ": weight must be positive");
      return *v;
    }
    const auto it = set.params.find(std::string(value));
    if (it == set.params.end()) throw fail("unknown param '" + std::string(value) + "'");
    return it->second;
  };

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view view(raw);
    for (std::size_t i = 0; i < view.size(); ++i) {
      if (view[i] == '#' && (i == 0 || view[i - 1] == ' ' || view[i - 1] == '\t')) {
        view = view.substr(0, i);
        break;
      }
    }
    const auto toks = detail::split_ws(view);
    if (toks.empty()) continue;
    if (have_default) throw fail("'default' must be the last directive");

    const std::string& head = toks[0];
    if (head == "param") {
      if (toks.size() != 2) throw fail("expected param <name>=<value>");
      const auto eq = toks[1].find('=');
      if (eq == std::string::npos || eq == 0) throw fail("expected param <name>=<value>");
      const std::string name = toks[1].substr(0, eq);
      auto value = detail::parse_number(std::string_view(toks[1]).substr(eq + 1));
      if (!value) throw fail("param value is not a number");
      if (const auto o = overrides.find(name); o != overrides.end()) value = o->second;
      if (!(*value > 0) || !std::isfinite(*value))
        throw ValidationError(Stage::weighting, "param " + name + " must be positive");
      set.params[name] = *value;
    } else if (head == "rule") {
      if (toks.size() < 3) throw fail("incomplete rule");
      WeightRule rule;
      std::size_t i = 2;
      const std::string& kw = toks[1];
      if (kw == "always") {
        rule.matcher = Always{};
      } else if (kw == "edge-label" || kw == "end-node-type" || kw == "start-has-out-edge") {
        auto args = detail::split_commas(toks[2]);
        if (args.empty() || toks[2].starts_with("weight=")) throw fail("matcher '" + kw + "' needs arguments");
        ++i;
        if (kw == "edge-label") {
          rule.matcher = EdgeLabelIn{std::move(args)};
        } else if (kw == "end-node-type") {
          rule.matcher = EndNodeTypeIn{std::move(args)};
        } else {
          if (args.size() != 1) throw fail("start-has-out-edge takes exactly one label");
          rule.matcher = StartNodeHasOutEdgeLabeled{args[0]};
        }
      } else {
        throw ValidationError(Stage::weighting, "line " + std::to_string(line_no) + ": unknown matcher '" + kw + "'");
      }
      if (i < toks.size() && toks[i] == "not") {
        rule.negate = true;
        ++i;
      }
      if (i + 1 != toks.size()) throw fail("expected exactly one weight= after the matcher");
      rule.weight = resolve_weight(toks[i]);
      set.rules.push_back(std::move(rule));
    } else if (head == "default") {
      if (toks.size() != 2) throw fail("expected default weight=<value>");
      set.default_weight = resolve_weight(toks[1]);
      have_default = true;
    } else {
      throw ValidationError(Stage::weighting, "line " + std::to_string(line_no) + ": unknown directive '" + head + "'");
    }
  }
  if (!have_default) throw ValidationError(Stage::weighting, "rule file has no 'default weight=' line");
  for (const auto& [name, value] : overrides) {
    if (!set.params.contains(name))
      throw ValidationError(Stage::weighting, "override of undeclared param '" + name + "'");
  }
  detail::validate_declared_params(set.params);
  set.validate();
  return set;
}

/// Type-erased per-edge weight function bound to one graph.
class EdgeWeighter {
 public:
  /// Structural strategy; computes graph statistics once.
  static EdgeWeighter builtin(const PropertyGraph& g, Strategy s) {
    auto stats = std::make_shared<const GraphStats>(compute_stats(g));
    return EdgeWeighter(std::string(strategy_name(s)), [&g, stats, s](EdgeIndex e) {
      return builtin_weight(s, g.edge(e), *stats);
    });
  }

  static EdgeWeighter rules(const PropertyGraph& g, const WeightRuleSet& set, std::string name = "rules") {
    auto bound = std::make_shared<const BoundRuleSet>(set, g);
    return EdgeWeighter(std::move(name), [bound](EdgeIndex e) { return (*bound)(e); });
  }

  EdgeWeighter(std::string name, std::function<double(EdgeIndex)> fn) : name_(std::move(name)), fn_(std::move(fn)) {}

  double operator()(EdgeIndex e) const { return fn_(e); }
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
  std::function<double(EdgeIndex)> fn_;
};

}  // namespace biaswalk
