#pragma once

// Reference implementations used only by tests. Each one recomputes a
// quantity from first principles without touching the code path under test.

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// Brute-force graph statistics over a plain (subject, predicate, object) list.

struct PlainEdge {
  std::string s, p, o;
};

inline std::map<std::string, std::size_t> count_predicates(const std::vector<PlainEdge>& edges) {
  std::map<std::string, std::size_t> out;
  for (const auto& e : edges) out[e.p] += 1;
  return out;
}

inline std::map<std::string, std::size_t> count_in_degrees(const std::vector<PlainEdge>& edges) {
  std::map<std::string, std::size_t> out;
  for (const auto& e : edges) out[e.o] += 1;
  return out;
}

// ---------------------------------------------------------------------------
// The nine domain-specific weighting functions, written as nested branches
// exactly like their pseudocode. `label` is the edge label's local name,
// `end_types` the end node's type local names, `start_has_broader` whether
// the start node has an outgoing `broader` edge.

struct EdgeView {
  std::string label;
  std::set<std::string> end_types;
  bool start_has_broader = false;
};

inline bool end_type_in(const EdgeView& e, std::initializer_list<const char*> types) {
  for (const char* t : types)
    if (e.end_types.contains(t)) return true;
  return false;
}

inline double aifb_1(const EdgeView& e, double w_low, double w_high) {
  double weight;
  if (e.label == "member" || e.label == "affiliation") {
    weight = w_high;
  } else {
    weight = w_low;
  }
  return weight;
}

inline double aifb_2(const EdgeView& e, double w_low, double w_high) {
  double weight;
  if (end_type_in(e, {"Person", "Project", "ResearchGroup", "ResearchTopic"})) {
    weight = w_high;
  } else {
    weight = w_low;
  }
  return weight;
}

inline double aifb_3(const EdgeView& e, double w_low, double w_high) {
  double weight;
  if (end_type_in(e, {"Publication"})) {
    weight = w_low;
  } else {
    weight = w_high;
  }
  return weight;
}

inline double aifb_4(const EdgeView& e, double w_low, double w, double w_high) {
  double weight;
  if (end_type_in(e, {"Publication"})) {
    weight = w_low;
  } else {
    if (e.label == "affiliation" || e.label == "member") {
      weight = w_high;
    } else {
      weight = w;
    }
  }
  return weight;
}

inline double bgs_1(const EdgeView& e, double w_low, double w_high) {
  double weight;
  if (e.label == "hasLithogenesis") {
    weight = w_high;
  } else {
    weight = w_low;
  }
  return weight;
}

inline double bgs_2(const EdgeView& e, double w_low, double w_high) {
  double weight;
  if (e.label == "hasLithogenesis") {
    weight = w_low;
  } else {
    weight = w_high;
  }
  return weight;
}

inline double bgs_3(const EdgeView& e, double w_low, double w, double w_high) {
  double weight;
  if (e.label == "hasLithogenesis") {
    weight = w_low;
  } else {
    if (e.label == "broader" || e.label == "narrower") {
      weight = w_high;
    } else {
      weight = w;
    }
  }
  return weight;
}

inline double bgs_4(const EdgeView& e, double w_low, double w_high) {
  double weight;
  if (e.label == "inScheme") {
    weight = w_low;
  } else {
    weight = w_high;
  }
  return weight;
}

// The trailing `weight <- w` is taken as the else branch of the
// hasLithogenesis test.
inline double bgs_5(const EdgeView& e, double w_low, double w, double w_high) {
  double weight;
  if (e.label == "broader") {
    weight = w_high;
  } else {
    if (e.label == "hasLithogenesis") {
      if (e.start_has_broader) {
        weight = w_low;
      } else {
        weight = w_high;
      }
    } else {
      weight = w;
    }
  }
  return weight;
}

// ---------------------------------------------------------------------------
// Statistics.

/// Pearson chi-square statistic of observed counts against expected probabilities.
inline double chi_square_statistic(const std::vector<std::size_t>& observed, const std::vector<double>& probs) {
  std::size_t n = 0;
  for (const auto o : observed) n += o;
  double stat = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = probs[i] * static_cast<double>(n);
    const double d = static_cast<double>(observed[i]) - expected;
    stat += d * d / expected;
  }
  return stat;
}

/// Upper critical value of the chi-square distribution.
inline double chi_square_critical(double df, double alpha) {
  return boost::math::quantile(boost::math::complement(boost::math::chi_squared(df), alpha));
}

// ---------------------------------------------------------------------------
// Negative-sampling loss written directly from its definition, on plain
// row-major matrices, for finite differences.

inline double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

inline double row_dot(const std::vector<double>& a, std::size_t ra, const std::vector<double>& b, std::size_t rb,
                      std::size_t d) {
  double s = 0;
  for (std::size_t k = 0; k < d; ++k) s += a[ra * d + k] * b[rb * d + k];
  return s;
}

/// CBOW: h = mean of context inputs; loss = -log s(out[center].h) - sum log s(-out[n].h).
inline double cbow_loss(const std::vector<double>& in, const std::vector<double>& out, std::size_t d,
                        std::uint32_t center, const std::vector<std::uint32_t>& context,
                        const std::vector<std::uint32_t>& negatives) {
  std::vector<double> h(d, 0.0);
  for (const auto c : context)
    for (std::size_t k = 0; k < d; ++k) h[k] += in[c * d + k] / static_cast<double>(context.size());
  auto score = [&](std::uint32_t t) {
    double s = 0;
    for (std::size_t k = 0; k < d; ++k) s += h[k] * out[t * d + k];
    return s;
  };
  double loss = -log_sigmoid(score(center));
  for (const auto n : negatives) loss -= log_sigmoid(-score(n));
  return loss;
}

/// Skip-gram: sum over context c of -log s(out[c].in[center]) - sum log s(-out[n].in[center]).
inline double skipgram_loss(const std::vector<double>& in, const std::vector<double>& out, std::size_t d,
                            std::uint32_t center, const std::vector<std::uint32_t>& context,
                            const std::vector<std::uint32_t>& negatives) {
  double loss = 0;
  for (const auto c : context) {
    loss -= log_sigmoid(row_dot(out, c, in, center, d));
    for (const auto n : negatives) loss -= log_sigmoid(-row_dot(out, n, in, center, d));
  }
  return loss;
}

/// Central-difference gradient of `f` with respect to every entry of `x`.
template <class F>
std::vector<double> central_difference(std::vector<double> x, F&& f, double step) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + step;
    const double up = f(x);
    x[i] = orig - step;
    const double down = f(x);
    x[i] = orig;
    g[i] = (up - down) / (2 * step);
  }
  return g;
}

/// Cosine similarity of two equal-length vectors.
template <class A, class B>
double cosine(const A& a, const B& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

}  // namespace oracle
