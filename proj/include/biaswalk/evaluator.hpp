#pragma once

/// @file evaluator.hpp
/// k-nearest-neighbor node classification over embeddings.
///
/// Neighbors are ranked by (distance, node IRI). The predicted label is the
/// plain majority among the k nearest; a vote tie goes to the label of the
/// single nearest neighbor if it is among the tied labels, otherwise to the
/// smallest tied label string.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "biaswalk/error.hpp"
#include "biaswalk/walker.hpp"

namespace biaswalk {

enum class Metric { euclidean, cosine };

inline std::string_view metric_name(Metric m) { return m == Metric::euclidean ? "euclidean" : "cosine"; }

inline std::optional<Metric> parse_metric(std::string_view s) {
  if (s == "euclidean") return Metric::euclidean;
  if (s == "cosine") return Metric::cosine;
  return std::nullopt;
}

struct LabeledNode {
  std::string node;
  std::string label;

  friend bool operator==(const LabeledNode&, const LabeledNode&) = default;
};

struct LabeledDataset {
  std::vector<LabeledNode> train;
  std::vector<LabeledNode> test;

  void validate() const {
    std::set<std::string_view> train_nodes, labels;
    for (const auto& x : train) {
      if (x.label.empty()) throw ValidationError(Stage::eval, "empty label for " + x.node);
      train_nodes.insert(x.node);
      labels.insert(x.label);
    }
    if (labels.size() < 2) throw ValidationError(Stage::eval, "training set needs at least two distinct labels");
    for (const auto& x : test) {
      if (x.label.empty()) throw ValidationError(Stage::eval, "empty label for " + x.node);
      if (train_nodes.contains(x.node))
        throw ValidationError(Stage::eval, "node appears in both train and test: " + x.node);
    }
  }
};

struct LabelFileOptions {
  std::size_t node_column = 0;
  std::size_t label_column = 1;
  /// Skip the first non-comment line.
  bool header = false;
};

/// TSV reader: `node<TAB>label` per line by default. Angle brackets around
/// the node IRI are stripped. Blank lines and `#` lines are skipped.
inline std::vector<LabeledNode> read_labels(std::istream& in, const LabelFileOptions& opt = {}) {
  std::vector<LabeledNode> out;
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = opt.header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    std::vector<std::string_view> cols;
    std::string_view v(line);
    while (true) {
      const auto tab = v.find('\t');
      cols.push_back(v.substr(0, tab));
      if (tab == std::string_view::npos) break;
      v.remove_prefix(tab + 1);
    }
    const std::size_t need = std::max(opt.node_column, opt.label_column) + 1;
    if (cols.size() < need) throw ParseError(Stage::eval, line_no, line, "expected at least " + std::to_string(need) + " tab-separated columns");
    std::string_view node = cols[opt.node_column];
    if (node.size() >= 2 && node.front() == '<' && node.back() == '>') node = node.substr(1, node.size() - 2);
    if (node.empty()) throw ParseError(Stage::eval, line_no, line, "empty node");
    if (cols[opt.label_column].empty()) throw ParseError(Stage::eval, line_no, line, "empty label");
    out.push_back(LabeledNode{std::string(node), std::string(cols[opt.label_column])});
  }
  return out;
}

inline void write_labels(std::ostream& out, std::span<const LabeledNode> rows) {
  for (const auto& r : rows) out << r.node << '\t' << r.label << '\n';
}

struct EvalConfig {
  std::size_t k = 4;
  Metric metric = Metric::euclidean;

  void validate() const {
    if (k < 1) throw ValidationError(Stage::eval, "k must be >= 1");
  }
};

/// Anything that maps a token to an optional contiguous range of numbers.
template <class V>
concept VectorSource = requires(const V& v, std::string_view token) {
  { v.vector_of(token) };
  { *v.vector_of(token) };
};

class KnnClassifier {
 public:
  template <VectorSource V>
  KnnClassifier(const V& vectors, std::span<const LabeledNode> train, EvalConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    if (train.empty()) throw ValidationError(Stage::eval, "empty training set");
    for (const auto& x : train) {
      points_.push_back(Point{x.node, x.label, to_vector(vectors, x.node)});
      if (cfg_.metric == Metric::cosine) normalize(points_.back().v);
    }
  }

  template <VectorSource V>
  std::string predict(const V& vectors, std::string_view node) const {
    auto q = to_vector(vectors, node);
    return predict(std::move(q));
  }

  /// Predict from a raw query vector.
  std::string predict(std::vector<double> q) const {
    if (cfg_.metric == Metric::cosine) normalize(q);
    struct Ranked {
      double dist;
      const Point* p;
    };
    std::vector<Ranked> ranked;
    ranked.reserve(points_.size());
    for (const auto& p : points_) {
      if (p.v.size() != q.size()) throw ValidationError(Stage::eval, "embedding dimensions differ");
      ranked.push_back({distance(q, p.v), &p});
    }
    const std::size_t k = std::min(cfg_.k, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end(),
                      [](const Ranked& a, const Ranked& b) {
                        if (a.dist != b.dist) return a.dist < b.dist;
                        return a.p->node < b.p->node;
                      });
    std::map<std::string_view, std::size_t> votes;
    for (std::size_t i = 0; i < k; ++i) ++votes[ranked[i].p->label];
    std::size_t best = 0;
    for (const auto& [label, n] : votes) best = std::max(best, n);
    const std::string& nearest = ranked[0].p->label;
    if (votes[nearest] == best) return nearest;
    for (const auto& [label, n] : votes)  // map order: ascending label
      if (n == best) return std::string(label);
    return nearest;
  }

  const EvalConfig& config() const noexcept { return cfg_; }

 private:
  struct Point {
    std::string node;
    std::string label;
    std::vector<double> v;
  };

  template <VectorSource V>
  static std::vector<double> to_vector(const V& vectors, std::string_view node) {
    const auto found = vectors.vector_of(escape_token(node));
    if (!found) throw Error(Stage::eval, "node missing from embeddings: " + std::string(node));
    return std::vector<double>(found->begin(), found->end());
  }

  static void normalize(std::vector<double>& v) {
    double n = 0;
    for (const double x : v) n += x * x;
    n = std::sqrt(n);
    if (n > 0)
      for (double& x : v) x /= n;
  }

  double distance(const std::vector<double>& a, const std::vector<double>& b) const {
    if (cfg_.metric == Metric::euclidean) {
      double s = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
      }
      return s;  // squared distance ranks identically
    }
    double dot = 0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    return 1.0 - dot;
  }

  EvalConfig cfg_;
  std::vector<Point> points_;
};

template <VectorSource V>
std::string knn_predict(const V& vectors, std::span<const LabeledNode> train, std::string_view query,
                        const EvalConfig& cfg) {
  return KnnClassifier(vectors, train, cfg).predict(vectors, query);
}

struct Prediction {
  std::string node;
  std::string truth;
  std::string predicted;
};

struct EvalReport {
  /// Percent of test nodes classified correctly, in [0, 100].
  double accuracy = 0;
  std::size_t correct = 0;
  std::vector<Prediction> predictions;
  /// confusion[truth][predicted] = count.
  std::map<std::string, std::map<std::string, std::size_t>> confusion;
};

template <VectorSource V>
EvalReport evaluate(const V& vectors, const LabeledDataset& dataset, const EvalConfig& cfg) {
  if (dataset.test.empty()) throw ValidationError(Stage::eval, "empty test set");
  dataset.validate();
  const KnnClassifier knn(vectors, dataset.train, cfg);
  EvalReport r;
  for (const auto& t : dataset.test) {
    Prediction p{t.node, t.label, knn.predict(vectors, t.node)};
    if (p.predicted == p.truth) ++r.correct;
    ++r.confusion[p.truth][p.predicted];
    r.predictions.push_back(std::move(p));
  }
  r.accuracy = 100.0 * static_cast<double>(r.correct) / static_cast<double>(dataset.test.size());
  return r;
}

/// `accuracy=<percent>` followed by one `label=... n=... correct=... predicted: a:3 b:1`
/// line per true label.
inline void print_report(const EvalReport& r, std::ostream& out) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", r.accuracy);
  out << "accuracy=" << buf << '\n';
  for (const auto& [truth, row] : r.confusion) {
    std::size_t n = 0;
    for (const auto& [pred, c] : row) n += c;
    const auto hit = row.find(truth);
    out << "label=" << truth << " n=" << n << " correct=" << (hit == row.end() ? 0 : hit->second) << " predicted:";
    for (const auto& [pred, c] : row) out << ' ' << pred << ':' << c;
    out << '\n';
  }
}

}  // namespace biaswalk
