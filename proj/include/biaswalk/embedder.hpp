#pragma once

/// @file embedder.hpp
/// word2vec (CBOW and skip-gram) with negative sampling over a walk corpus.
///
/// For a hidden vector h, a positive target o and negatives n_1..n_K the
/// per-example loss is
///
///     L = -log s(out[o] . h) - sum_j log s(-out[n_j] . h),   s = sigmoid
///
/// Skip-gram uses h = in[center] and predicts each context token; CBOW uses
/// h = mean(in[context]) and predicts the center token.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <type_traits>
#include <vector>

#include "biaswalk/error.hpp"
#include "biaswalk/graph.hpp"
#include "biaswalk/rng.hpp"
#include "biaswalk/walker.hpp"

namespace biaswalk {

enum class TrainMode { cbow, skipgram };

inline std::string_view train_mode_name(TrainMode m) { return m == TrainMode::cbow ? "cbow" : "skipgram"; }

inline std::optional<TrainMode> parse_train_mode(std::string_view s) {
  if (s == "cbow") return TrainMode::cbow;
  if (s == "skipgram" || s == "skip-gram") return TrainMode::skipgram;
  return std::nullopt;
}

struct TrainConfig {
  TrainMode mode = TrainMode::cbow;
  std::size_t dim = 200;
  std::size_t window = 5;
  std::size_t epochs = 10;
  std::size_t negatives = 25;
  double lr_start = 0.025;
  double lr_end = 0.0001;
  std::uint64_t min_count = 1;
  /// Frequent-token downsampling threshold; 0 disables it.
  double subsample = 0;
  /// Single sequential update stream; bitwise reproducible for a seed.
  bool deterministic = false;
  /// Worker threads for the non-deterministic mode; 0 picks hardware concurrency.
  unsigned workers = 0;
  std::uint64_t seed = 1;

  void validate() const {
    if (dim < 1) throw ValidationError(Stage::train, "dim must be >= 1");
    if (window < 1) throw ValidationError(Stage::train, "window must be >= 1");
    if (negatives < 1) throw ValidationError(Stage::train, "negatives must be >= 1");
    if (!(lr_end > 0) || !(lr_end < lr_start)) throw ValidationError(Stage::train, "require 0 < lr_end < lr_start");
    if (subsample < 0) throw ValidationError(Stage::train, "subsample must be >= 0");
  }
};

/// Sentences of interned tokens.
class TokenCorpus {
 public:
  /// One sentence per non-empty line, tokens separated by whitespace.
  static TokenCorpus read(std::istream& in) {
    TokenCorpus c;
    std::string line;
    std::vector<std::string_view> toks;
    while (std::getline(in, line)) {
      toks.clear();
      std::string_view v(line);
      std::size_t i = 0;
      while (i < v.size()) {
        while (i < v.size() && std::isspace(static_cast<unsigned char>(v[i]))) ++i;
        const std::size_t b = i;
        while (i < v.size() && !std::isspace(static_cast<unsigned char>(v[i]))) ++i;
        if (i > b) toks.push_back(v.substr(b, i - b));
      }
      if (!toks.empty()) c.add_sentence(toks);
    }
    return c;
  }

  /// Same token sequence write_corpus would produce, without the text round trip.
  static TokenCorpus from_walks(const PropertyGraph& g, const WalkCorpus& walks) {
    TokenCorpus c;
    for (const auto& w : walks.walks) {
      const auto toks = walk_tokens(g, w, walks.emit_edge_labels);
      c.add_sentence(toks);
    }
    return c;
  }

  template <class Range>
  void add_sentence(const Range& tokens) {
    for (const auto& t : tokens) ids_.push_back(intern(std::string_view(t)));
    offsets_.push_back(ids_.size());
  }

  std::size_t sentence_count() const noexcept { return offsets_.size() - 1; }
  std::span<const std::uint32_t> sentence(std::size_t i) const {
    return std::span<const std::uint32_t>(ids_).subspan(offsets_.at(i), offsets_.at(i + 1) - offsets_.at(i));
  }
  std::size_t token_count() const noexcept { return ids_.size(); }
  std::size_t type_count() const noexcept { return types_.size(); }
  const std::string& type(std::uint32_t id) const { return types_.at(id); }

 private:
  std::uint32_t intern(std::string_view t) {
    if (const auto it = index_.find(t); it != index_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(types_.size());
    types_.emplace_back(t);
    index_.emplace(std::string(t), id);
    return id;
  }

  std::vector<std::string> types_;
  detail::StringIndex index_;
  std::vector<std::uint32_t> ids_;
  std::vector<std::size_t> offsets_{0};
};

/// Token table ordered by (descending count, token), with the unigram^0.75
/// noise distribution used to draw negatives.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Tokens are taken in the given order.
  Vocabulary(std::vector<std::string> tokens, std::vector<std::uint64_t> counts)
      : tokens_(std::move(tokens)), counts_(std::move(counts)) {
    if (tokens_.size() != counts_.size()) throw ContractViolation("Vocabulary: tokens and counts differ in length");
    for (std::uint32_t i = 0; i < tokens_.size(); ++i) {
      if (!index_.emplace(tokens_[i], i).second) throw ContractViolation("Vocabulary: duplicate token " + tokens_[i]);
      total_ += counts_[i];
    }
    double acc = 0;
    noise_cdf_.reserve(tokens_.size());
    for (const auto c : counts_) {
      acc += std::pow(static_cast<double>(c), 0.75);
      noise_cdf_.push_back(acc);
    }
    for (auto& x : noise_cdf_) x /= acc;
    if (!noise_cdf_.empty()) noise_cdf_.back() = 1.0;
  }

  static Vocabulary build(const TokenCorpus& corpus, std::uint64_t min_count) {
    if (corpus.token_count() == 0) throw Error(Stage::train, "cannot build a vocabulary from an empty corpus");
    std::vector<std::uint64_t> counts(corpus.type_count(), 0);
    for (std::size_t s = 0; s < corpus.sentence_count(); ++s)
      for (const auto id : corpus.sentence(s)) ++counts[id];
    std::vector<std::uint32_t> order;
    for (std::uint32_t id = 0; id < counts.size(); ++id)
      if (counts[id] >= min_count) order.push_back(id);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (counts[a] != counts[b]) return counts[a] > counts[b];
      return corpus.type(a) < corpus.type(b);
    });
    std::vector<std::string> toks;
    std::vector<std::uint64_t> cnts;
    for (const auto id : order) {
      toks.push_back(corpus.type(id));
      cnts.push_back(counts[id]);
    }
    return Vocabulary(std::move(toks), std::move(cnts));
  }

  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  const std::string& token(std::uint32_t i) const { return tokens_.at(i); }
  std::uint64_t count(std::uint32_t i) const { return counts_.at(i); }
  std::uint64_t total_count() const noexcept { return total_; }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  std::optional<std::uint32_t> find(std::string_view token) const {
    const auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Cumulative noise distribution; last entry is exactly 1.
  std::span<const double> noise_cdf() const noexcept { return noise_cdf_; }

  /// Inverse-CDF draw for u in [0, 1).
  std::uint32_t sample_noise(double u) const {
    const auto it = std::upper_bound(noise_cdf_.begin(), noise_cdf_.end(), u);
    return static_cast<std::uint32_t>(std::min<std::size_t>(it - noise_cdf_.begin(), noise_cdf_.size() - 1));
  }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::vector<double> noise_cdf_;
  detail::StringIndex index_;
  std::uint64_t total_ = 0;
};

/// Input and output vectors, |V| x dim each, row-major.
template <class Real>
struct BasicEmbeddingMatrix {
  static_assert(std::is_floating_point_v<Real>);

  Vocabulary vocab;
  std::size_t dim = 0;
  std::vector<Real> input;
  std::vector<Real> output;

  BasicEmbeddingMatrix() = default;
  BasicEmbeddingMatrix(Vocabulary v, std::size_t d)
      : vocab(std::move(v)), dim(d), input(vocab.size() * d, Real(0)), output(vocab.size() * d, Real(0)) {}

  std::span<Real> input_row(std::uint32_t i) { return std::span<Real>(input).subspan(std::size_t{i} * dim, dim); }
  std::span<const Real> input_row(std::uint32_t i) const {
    return std::span<const Real>(input).subspan(std::size_t{i} * dim, dim);
  }
  std::span<Real> output_row(std::uint32_t i) { return std::span<Real>(output).subspan(std::size_t{i} * dim, dim); }
  std::span<const Real> output_row(std::uint32_t i) const {
    return std::span<const Real>(output).subspan(std::size_t{i} * dim, dim);
  }

  /// Embedding of a token (its input vector).
  std::optional<std::span<const Real>> vector_of(std::string_view token) const {
    const auto id = vocab.find(token);
    if (!id) return std::nullopt;
    return input_row(*id);
  }
  std::size_t size() const noexcept { return vocab.size(); }
};

using EmbeddingMatrix = BasicEmbeddingMatrix<float>;

namespace detail {

template <class Real>
Real dot(const Real* a, const Real* b, std::size_t n) {
  // Eight independent accumulators let the compiler vectorize without
  // reassociating, so results stay reproducible.
  Real acc[8] = {};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    for (std::size_t k = 0; k < 8; ++k) acc[k] += a[i + k] * b[i + k];
  Real tail = 0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

template <class Real>
void axpy(Real alpha, const Real* x, Real* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

/// log(1 + e^x), overflow-safe.
inline double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

template <class Real>
Real sigmoid(Real x) {
  return Real(1) / (Real(1) + std::exp(-x));
}

/// Coefficient of one output row in the gradient: dL/d out[target] = coeff * h.
struct OutputCoeff {
  std::uint32_t target;
  double coeff;
};

/// Loss of one (hidden, positive, negatives) example. Adds dL/dh to
/// `hidden_grad` and appends one OutputCoeff per target. All scores are taken
/// before any update, so the caller applies an exact gradient step even when a
/// target repeats.
template <class Real>
double negative_sampling(const Real* hidden, std::uint32_t positive, std::span<const std::uint32_t> negatives,
                         const Real* output, std::size_t dim, Real* hidden_grad, std::vector<OutputCoeff>& coeffs) {
  double loss = 0;
  coeffs.clear();
  auto score = [&](std::uint32_t t, bool is_positive) {
    const Real* o = output + std::size_t{t} * dim;
    const Real x = dot(hidden, o, dim);
    const Real g = sigmoid(x) - (is_positive ? Real(1) : Real(0));
    loss += is_positive ? softplus(-static_cast<double>(x)) : softplus(static_cast<double>(x));
    axpy(g, o, hidden_grad, dim);
    coeffs.push_back({t, static_cast<double>(g)});
  };
  score(positive, true);
  for (const auto n : negatives) score(n, false);
  return loss;
}

}  // namespace detail

/// Loss and gradients for one training example, returned rather than applied.
template <class Real>
struct Gradients {
  double loss = 0;
  /// dL/d input row, keyed by vocabulary index.
  std::map<std::uint32_t, std::vector<Real>> input;
  /// dL/d output row, keyed by vocabulary index.
  std::map<std::uint32_t, std::vector<Real>> output;
};

/// Skip-gram: in[center] predicts every context token, each against the same
/// negatives. CBOW: the mean of the context input vectors predicts center.
template <class Real>
Gradients<Real> loss_and_gradients(std::uint32_t center, std::span<const std::uint32_t> context,
                                   std::span<const std::uint32_t> negatives, const BasicEmbeddingMatrix<Real>& m,
                                   TrainMode mode) {
  const std::size_t v = m.vocab.size();
  const std::size_t d = m.dim;
  auto check = [&](std::uint32_t id) {
    if (id >= v) throw Error(Stage::train, "unknown token index " + std::to_string(id));
  };
  check(center);
  for (const auto c : context) check(c);
  for (const auto n : negatives) check(n);
  if (context.empty()) throw ContractViolation("loss_and_gradients: empty context");

  Gradients<Real> out;
  auto grad_row = [&](std::map<std::uint32_t, std::vector<Real>>& map, std::uint32_t id) -> std::vector<Real>& {
    auto& row = map[id];
    if (row.empty()) row.assign(d, Real(0));
    return row;
  };
  std::vector<detail::OutputCoeff> coeffs;
  std::vector<Real> hidden_grad(d);

  auto accumulate_outputs = [&](const Real* hidden) {
    for (const auto& c : coeffs) detail::axpy(static_cast<Real>(c.coeff), hidden, grad_row(out.output, c.target).data(), d);
  };

  if (mode == TrainMode::skipgram) {
    const Real* h = m.input.data() + std::size_t{center} * d;
    for (const auto ctx : context) {
      std::fill(hidden_grad.begin(), hidden_grad.end(), Real(0));
      out.loss += detail::negative_sampling(h, ctx, negatives, m.output.data(), d, hidden_grad.data(), coeffs);
      accumulate_outputs(h);
      detail::axpy(Real(1), hidden_grad.data(), grad_row(out.input, center).data(), d);
    }
  } else {
    std::vector<Real> h(d, Real(0));
    for (const auto ctx : context) detail::axpy(Real(1), m.input.data() + std::size_t{ctx} * d, h.data(), d);
    const Real inv = Real(1) / static_cast<Real>(context.size());
    for (auto& x : h) x *= inv;
    out.loss = detail::negative_sampling(h.data(), center, negatives, m.output.data(), d, hidden_grad.data(), coeffs);
    accumulate_outputs(h.data());
    for (const auto ctx : context) detail::axpy(inv, hidden_grad.data(), grad_row(out.input, ctx).data(), d);
  }
  return out;
}

/// Token-string convenience overload.
template <class Real>
Gradients<Real> loss_and_gradients(std::string_view center, std::span<const std::string> context,
                                   std::span<const std::string> negatives, const BasicEmbeddingMatrix<Real>& m,
                                   TrainMode mode) {
  auto resolve = [&](std::string_view t) {
    const auto id = m.vocab.find(t);
    if (!id) throw Error(Stage::train, "unknown token '" + std::string(t) + "'");
    return *id;
  };
  std::vector<std::uint32_t> ctx, neg;
  for (const auto& t : context) ctx.push_back(resolve(t));
  for (const auto& t : negatives) neg.push_back(resolve(t));
  return loss_and_gradients<Real>(resolve(center), ctx, neg, m, mode);
}

struct TrainStats {
  /// Mean loss per example, one entry per epoch.
  std::vector<double> epoch_loss;
  std::uint64_t examples = 0;
};

namespace detail {

/// Shared state of one training run.
template <class Real>
struct Trainer {
  const TrainConfig& cfg;
  BasicEmbeddingMatrix<Real>& m;
  const std::vector<std::vector<std::uint32_t>>& sentences;
  std::vector<double> keep_prob;  // empty when subsampling is off
  double total_steps = 1;
  std::atomic<std::uint64_t> processed{0};

  double learning_rate(std::uint64_t done) const {
    const double frac = std::min(1.0, static_cast<double>(done) / total_steps);
    return std::max(cfg.lr_end, cfg.lr_start - (cfg.lr_start - cfg.lr_end) * frac);
  }

  struct Partial {
    double loss = 0;
    std::uint64_t examples = 0;
  };

  Partial run(std::size_t begin, std::size_t end, Xoshiro256& rng) {
    const std::size_t d = m.dim;
    std::vector<std::uint32_t> kept, ctx, negs;
    std::vector<Real> hidden(d), hidden_grad(d);
    std::vector<OutputCoeff> coeffs;
    Partial part;
    std::uint64_t local = 0;

    auto draw_negatives = [&](std::uint32_t positive) {
      negs.clear();
      for (std::size_t k = 0; k < cfg.negatives; ++k) {
        const auto n = m.vocab.sample_noise(rng.uniform01());
        if (n != positive) negs.push_back(n);
      }
    };
    auto apply_outputs = [&](const Real* h, Real lr) {
      for (const auto& c : coeffs)
        axpy(static_cast<Real>(-lr * c.coeff), h, m.output.data() + std::size_t{c.target} * d, d);
    };

    for (std::size_t s = begin; s < end; ++s) {
      const auto& sent = sentences[s];
      kept.clear();
      for (const auto id : sent)
        if (keep_prob.empty() || rng.uniform01() < keep_prob[id]) kept.push_back(id);
      local += sent.size();
      if (local >= 1024) {
        processed.fetch_add(local, std::memory_order_relaxed);
        local = 0;
      }
      const Real lr = static_cast<Real>(learning_rate(processed.load(std::memory_order_relaxed) + local));

      for (std::size_t i = 0; i < kept.size(); ++i) {
        const std::size_t span = cfg.window - rng.below(cfg.window);
        const std::size_t lo = i >= span ? i - span : 0;
        const std::size_t hi = std::min(kept.size() - 1, i + span);
        ctx.clear();
        for (std::size_t j = lo; j <= hi; ++j)
          if (j != i) ctx.push_back(kept[j]);
        if (ctx.empty()) continue;
        const std::uint32_t center = kept[i];

        if (cfg.mode == TrainMode::cbow) {
          std::fill(hidden.begin(), hidden.end(), Real(0));
          for (const auto c : ctx) axpy(Real(1), m.input.data() + std::size_t{c} * d, hidden.data(), d);
          const Real inv = Real(1) / static_cast<Real>(ctx.size());
          for (auto& x : hidden) x *= inv;
          std::fill(hidden_grad.begin(), hidden_grad.end(), Real(0));
          draw_negatives(center);
          part.loss += negative_sampling(hidden.data(), center, negs, m.output.data(), d, hidden_grad.data(), coeffs);
          ++part.examples;
          apply_outputs(hidden.data(), lr);
          for (const auto c : ctx) axpy(-lr * inv, hidden_grad.data(), m.input.data() + std::size_t{c} * d, d);
        } else {
          Real* h = m.input.data() + std::size_t{center} * d;
          for (const auto c : ctx) {
            std::fill(hidden_grad.begin(), hidden_grad.end(), Real(0));
            draw_negatives(c);
            part.loss += negative_sampling(h, c, negs, m.output.data(), d, hidden_grad.data(), coeffs);
            ++part.examples;
            apply_outputs(h, lr);
            axpy(-lr, hidden_grad.data(), h, d);
          }
        }
      }
    }
    processed.fetch_add(local, std::memory_order_relaxed);
    return part;
  }
};

}  // namespace detail

/// Train embeddings. Input vectors start uniform in [-0.5/dim, 0.5/dim],
/// output vectors at zero; the learning rate decays linearly from lr_start to
/// lr_end over epochs x corpus tokens.
template <class Real = float>
BasicEmbeddingMatrix<Real> train(const TokenCorpus& corpus, const TrainConfig& cfg, TrainStats* stats = nullptr) {
  cfg.validate();
  Vocabulary vocab = Vocabulary::build(corpus, cfg.min_count);
  if (vocab.empty()) throw Error(Stage::train, "vocabulary is empty after applying min_count");

  BasicEmbeddingMatrix<Real> m(std::move(vocab), cfg.dim);
  {
    auto rng = Xoshiro256::stream(cfg.seed, 0x1417);
    const double scale = 1.0 / static_cast<double>(cfg.dim);
    for (auto& x : m.input) x = static_cast<Real>((rng.uniform01() - 0.5) * scale);
  }

  std::vector<std::int64_t> remap(corpus.type_count(), -1);
  for (std::uint32_t t = 0; t < corpus.type_count(); ++t)
    if (const auto id = m.vocab.find(corpus.type(t))) remap[t] = *id;
  std::vector<std::vector<std::uint32_t>> sentences;
  sentences.reserve(corpus.sentence_count());
  std::uint64_t retained = 0;
  for (std::size_t s = 0; s < corpus.sentence_count(); ++s) {
    std::vector<std::uint32_t> sent;
    for (const auto t : corpus.sentence(s))
      if (remap[t] >= 0) sent.push_back(static_cast<std::uint32_t>(remap[t]));
    retained += sent.size();
    if (!sent.empty()) sentences.push_back(std::move(sent));
  }

  detail::Trainer<Real> trainer{cfg, m, sentences, {}};
  trainer.total_steps = std::max(1.0, static_cast<double>(retained) * static_cast<double>(cfg.epochs));
  if (cfg.subsample > 0) {
    const double threshold = cfg.subsample * static_cast<double>(m.vocab.total_count());
    trainer.keep_prob.resize(m.vocab.size());
    for (std::uint32_t i = 0; i < m.vocab.size(); ++i) {
      const double f = static_cast<double>(m.vocab.count(i));
      trainer.keep_prob[i] = std::min(1.0, (std::sqrt(f / threshold) + 1.0) * threshold / f);
    }
  }

  if (stats) *stats = TrainStats{};
  const unsigned workers =
      cfg.deterministic ? 1u
                        : static_cast<unsigned>(std::min<std::size_t>(detail::resolve_workers(cfg.workers),
                                                                      std::max<std::size_t>(1, sentences.size())));
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<typename detail::Trainer<Real>::Partial> parts(workers);
    if (workers == 1) {
      auto rng = Xoshiro256::stream(cfg.seed, epoch + 1, 0);
      parts[0] = trainer.run(0, sentences.size(), rng);
    } else {
      // Lock-free concurrent updates to shared rows; results vary run to run.
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          const std::size_t b = sentences.size() * w / workers;
          const std::size_t e = sentences.size() * (w + 1) / workers;
          auto rng = Xoshiro256::stream(cfg.seed, epoch + 1, w);
          parts[w] = trainer.run(b, e, rng);
        });
      }
    }
    if (stats) {
      double loss = 0;
      std::uint64_t n = 0;
      for (const auto& p : parts) {
        loss += p.loss;
        n += p.examples;
      }
      stats->epoch_loss.push_back(n ? loss / static_cast<double>(n) : 0.0);
      stats->examples += n;
    }
  }
  return m;
}

namespace detail {

template <class Real>
void append_number(std::string& out, Real x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  out.append(buf, ptr);
}

}  // namespace detail

/// Text format: header `<count> <dim>`, then `<token> v_1 ... v_dim` per line.
/// Values are written in shortest round-trip form.
template <class Real>
void write_embeddings(const BasicEmbeddingMatrix<Real>& m, std::ostream& out) {
  std::string line = std::to_string(m.size()) + ' ' + std::to_string(m.dim) + '\n';
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  for (std::uint32_t i = 0; i < m.size(); ++i) {
    line = m.vocab.token(i);
    for (const Real x : m.input_row(i)) {
      line += ' ';
      detail::append_number(line, x);
    }
    line += '\n';
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
  if (!out) throw Error(Stage::train, "failed to write embeddings");
}

/// Token vectors loaded from an embeddings file.
class KeyedVectors {
 public:
  static KeyedVectors read(std::istream& in) {
    KeyedVectors kv;
    std::string line;
    std::size_t line_no = 0;
    std::size_t count = 0;
    auto fail = [&](const std::string& reason) { return ParseError(Stage::eval, line_no, line, reason); };
    if (!std::getline(in, line)) throw Error(Stage::eval, "embeddings file is empty");
    ++line_no;
    {
      std::istringstream header(line);
      if (!(header >> count >> kv.dim_) || kv.dim_ == 0) throw fail("bad header, expected '<count> <dim>'");
    }
    kv.data_.reserve(count * kv.dim_);
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::string_view v(line);
      const auto sp = v.find(' ');
      if (sp == std::string_view::npos || sp == 0) throw fail("expected a token followed by values");
      const std::string token(v.substr(0, sp));
      v.remove_prefix(sp + 1);
      for (std::size_t k = 0; k < kv.dim_; ++k) {
        while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
        double x = 0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc{}) throw fail("expected " + std::to_string(kv.dim_) + " numeric values");
        v.remove_prefix(static_cast<std::size_t>(ptr - v.data()));
        kv.data_.push_back(x);
      }
      while (!v.empty() && (v.front() == ' ' || v.front() == '\r')) v.remove_prefix(1);
      if (!v.empty()) throw fail("too many values");
      if (!kv.index_.emplace(token, static_cast<std::uint32_t>(kv.tokens_.size())).second)
        throw fail("duplicate token");
      kv.tokens_.push_back(token);
    }
    if (kv.tokens_.size() != count) throw Error(Stage::eval, "embeddings header count does not match the rows");
    return kv;
  }

  template <class Real>
  static KeyedVectors from_matrix(const BasicEmbeddingMatrix<Real>& m) {
    KeyedVectors kv;
    kv.dim_ = m.dim;
    kv.tokens_ = m.vocab.tokens();
    for (std::uint32_t i = 0; i < kv.tokens_.size(); ++i) kv.index_.emplace(kv.tokens_[i], i);
    kv.data_.assign(m.input.begin(), m.input.end());
    return kv;
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::span<const double> row(std::uint32_t i) const {
    return std::span<const double>(data_).subspan(std::size_t{i} * dim_, dim_);
  }
  std::span<double> row(std::uint32_t i) { return std::span<double>(data_).subspan(std::size_t{i} * dim_, dim_); }

  std::optional<std::span<const double>> vector_of(std::string_view token) const {
    const auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return row(it->second);
  }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> tokens_;
  std::vector<double> data_;
  detail::StringIndex index_;
};

}  // namespace biaswalk
