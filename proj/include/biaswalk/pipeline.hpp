#pragma once

/// @file pipeline.hpp
/// Stage functions shared by the command-line front end and the pipeline
/// runner (ingest, walk, train, eval over files), and an in-memory
/// experiment runner comparing strategies over repeated seeds.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "biaswalk/embedder.hpp"
#include "biaswalk/error.hpp"
#include "biaswalk/evaluator.hpp"
#include "biaswalk/graph.hpp"
#include "biaswalk/ntriples.hpp"
#include "biaswalk/rng.hpp"
#include "biaswalk/snapshot.hpp"
#include "biaswalk/synth.hpp"
#include "biaswalk/walker.hpp"
#include "biaswalk/weighting.hpp"

namespace biaswalk {

/// A named edge-weighting choice. `source` is a builtin strategy name or
/// `rules:FILE` for a rule file.
struct StrategySpec {
  std::string name;
  std::string source;
  ParamOverrides overrides;
};

inline constexpr std::string_view rules_prefix = "rules:";

/// Parse `name=source` or a bare `source`. A bare builtin is named after
/// itself, a bare rule file after its file stem.
inline StrategySpec parse_strategy_spec(std::string_view text) {
  StrategySpec s;
  if (const auto eq = text.find('='); eq != std::string_view::npos) {
    s.name = std::string(text.substr(0, eq));
    s.source = std::string(text.substr(eq + 1));
  } else {
    s.source = std::string(text);
    s.name = text.starts_with(rules_prefix)
                 ? std::filesystem::path(std::string(text.substr(rules_prefix.size()))).stem().string()
                 : s.source;
  }
  if (s.name.empty() || s.source.empty()) throw ValidationError(Stage::config, "bad strategy: " + std::string(text));
  return s;
}

inline std::string read_text_file(const std::filesystem::path& path, Stage stage, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(stage, "cannot open " + std::string(what) + ": " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline EdgeWeighter make_weighter(const PropertyGraph& g, const StrategySpec& spec) {
  const std::string_view src = spec.source;
  if (src.starts_with(rules_prefix)) {
    const std::string text = read_text_file(std::string(src.substr(rules_prefix.size())), Stage::weighting, "rule file");
    return EdgeWeighter::rules(g, load_ruleset(text, spec.overrides), spec.name);
  }
  const auto builtin = parse_strategy(src);
  if (!builtin) throw ValidationError(Stage::weighting, "unknown strategy: " + spec.source);
  if (!spec.overrides.empty())
    throw ValidationError(Stage::weighting, "parameter overrides apply only to rule files, not to " + spec.source);
  return EdgeWeighter::builtin(g, *builtin);
}

// ---------------------------------------------------------------------------
// File-level stages

struct IngestOptions {
  BuildOptions build;
  bool lenient = false;
};

struct IngestSummary {
  std::size_t triples = 0;
  std::size_t skipped = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
};

inline PropertyGraph ingest(std::istream& in, const IngestOptions& opt, IngestSummary* summary = nullptr) {
  ParseOptions po;
  po.lenient = opt.lenient;
  NTriplesReader reader(in, po);
  std::vector<Triple> triples;
  while (auto t = reader.next()) triples.push_back(std::move(*t));
  PropertyGraph g = build_graph(triples, opt.build);
  if (summary) *summary = IngestSummary{triples.size(), reader.skipped(), g.node_count(), g.edge_count()};
  return g;
}

inline IngestSummary ingest_file(const std::filesystem::path& nt, const std::filesystem::path& snapshot,
                                 const IngestOptions& opt) {
  std::ifstream in(nt, std::ios::binary);
  if (!in) throw Error(Stage::ingest, "cannot open graph file: " + nt.string());
  IngestSummary summary;
  const PropertyGraph g = ingest(in, opt, &summary);
  std::ofstream out(snapshot, std::ios::binary);
  if (!out) throw Error(Stage::ingest, "cannot write snapshot: " + snapshot.string());
  save_snapshot(g, out);
  return summary;
}

inline PropertyGraph load_snapshot_file(const std::filesystem::path& snapshot) {
  std::ifstream in(snapshot, std::ios::binary);
  if (!in) throw Error(Stage::ingest, "cannot open snapshot: " + snapshot.string());
  return load_snapshot(in);
}

inline std::size_t walk_file(const std::filesystem::path& snapshot, const StrategySpec& strategy,
                             const WalkConfig& cfg, const std::filesystem::path& corpus_out) {
  const PropertyGraph g = load_snapshot_file(snapshot);
  const EdgeWeighter w = make_weighter(g, strategy);
  const WalkCorpus corpus = generate_walks(g, w, cfg);
  std::ofstream out(corpus_out, std::ios::binary);
  if (!out) throw Error(Stage::walk, "cannot write corpus: " + corpus_out.string());
  write_corpus(g, corpus, out);
  return corpus.walks.size();
}

inline std::size_t train_file(const std::filesystem::path& corpus_in, const TrainConfig& cfg,
                              const std::filesystem::path& vectors_out) {
  std::ifstream in(corpus_in, std::ios::binary);
  if (!in) throw Error(Stage::train, "cannot open corpus: " + corpus_in.string());
  const TokenCorpus corpus = TokenCorpus::read(in);
  const EmbeddingMatrix m = train(corpus, cfg);
  std::ofstream out(vectors_out, std::ios::binary);
  if (!out) throw Error(Stage::train, "cannot write embeddings: " + vectors_out.string());
  write_embeddings(m, out);
  return m.size();
}

inline std::vector<LabeledNode> read_labels_file(const std::filesystem::path& path, const LabelFileOptions& opt = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Stage::eval, "cannot open labels file: " + path.string());
  return read_labels(in, opt);
}

inline EvalReport eval_files(const std::filesystem::path& vectors, const std::filesystem::path& train,
                             const std::filesystem::path& test, const EvalConfig& cfg) {
  std::ifstream in(vectors, std::ios::binary);
  if (!in) throw Error(Stage::eval, "cannot open embeddings: " + vectors.string());
  const KeyedVectors kv = KeyedVectors::read(in);
  const LabeledDataset ds{read_labels_file(train), read_labels_file(test)};
  return evaluate(kv, ds, cfg);
}

// ---------------------------------------------------------------------------
// Single-strategy pipeline over files

struct PipelineSpec {
  std::filesystem::path graph;
  std::filesystem::path train_labels;
  std::filesystem::path test_labels;
  std::filesystem::path workdir;
  StrategySpec strategy{"uniform", "uniform", {}};
  IngestOptions ingest;
  WalkConfig walk;
  TrainConfig train;
  EvalConfig eval;
};

struct PipelineArtifacts {
  std::filesystem::path snapshot, corpus, vectors, report;
};

inline PipelineArtifacts pipeline_artifacts(const std::filesystem::path& workdir) {
  return {workdir / "graph.bin", workdir / "corpus.txt", workdir / "vectors.txt", workdir / "report.txt"};
}

/// ingest -> walk -> train -> eval, writing every intermediate artifact into
/// spec.workdir. The artifacts are byte-identical to those of the stage
/// commands run by hand with the same arguments.
inline EvalReport run_pipeline(const PipelineSpec& spec) {
  std::error_code ec;
  std::filesystem::create_directories(spec.workdir, ec);
  if (ec) throw Error(Stage::config, "cannot create workdir " + spec.workdir.string() + ": " + ec.message());
  const auto a = pipeline_artifacts(spec.workdir);
  ingest_file(spec.graph, a.snapshot, spec.ingest);
  walk_file(a.snapshot, spec.strategy, spec.walk, a.corpus);
  train_file(a.corpus, spec.train, a.vectors);
  EvalReport report = eval_files(a.vectors, spec.train_labels, spec.test_labels, spec.eval);
  std::ofstream out(a.report, std::ios::binary);
  print_report(report, out);
  return report;
}

// ---------------------------------------------------------------------------
// In-memory experiments

/// One in-memory walk -> train -> eval run.
inline EvalReport run_in_memory(const PropertyGraph& g, const LabeledDataset& ds, const EdgeWeighter& weighter,
                                const WalkConfig& walk, const TrainConfig& train_cfg, const EvalConfig& eval,
                                WalkCorpus* corpus_out = nullptr) {
  WalkCorpus corpus = generate_walks(g, weighter, walk);
  const EmbeddingMatrix m = train(TokenCorpus::from_walks(g, corpus), train_cfg);
  EvalReport r = evaluate(m, ds, eval);
  if (corpus_out) *corpus_out = std::move(corpus);
  return r;
}

struct FileGraphSource {
  std::filesystem::path graph, train_labels, test_labels;
  IngestOptions ingest;
};

using GraphSource = std::variant<FileGraphSource, AffiliationSynthConfig, HierarchySynthConfig>;

struct ExperimentSpec {
  GraphSource source;
  std::vector<StrategySpec> strategies;
  WalkConfig walk;
  std::vector<TrainConfig> train_configs{TrainConfig{}};
  EvalConfig eval;
  std::uint32_t repetitions = 1;
  std::uint64_t seed = 0;
  /// Cells run concurrently; 0 picks hardware concurrency.
  unsigned jobs = 1;

  void validate() const {
    if (strategies.empty()) throw ValidationError(Stage::config, "experiment needs at least one strategy");
    if (train_configs.empty()) throw ValidationError(Stage::config, "experiment needs at least one train config");
    if (repetitions < 1) throw ValidationError(Stage::config, "repetitions must be >= 1");
    walk.validate();
    for (const auto& t : train_configs) t.validate();
    eval.validate();
  }
};

/// Seeds of one repetition. Every strategy and train config of the same
/// repetition shares them.
struct RepSeeds {
  std::uint64_t graph, walk, train;
};

inline RepSeeds repetition_seeds(std::uint64_t seed, std::uint32_t rep) {
  return {derive_key(seed, rep, 1), derive_key(seed, rep, 2), derive_key(seed, rep, 3)};
}

struct CellResult {
  std::string strategy;
  TrainMode mode = TrainMode::cbow;
  std::size_t dim = 0;
  std::uint32_t rep = 0;
  std::optional<double> accuracy;
  std::string error;
};

struct SummaryRow {
  std::string strategy;
  TrainMode mode = TrainMode::cbow;
  std::size_t dim = 0;
  std::size_t runs = 0;
  std::size_t failures = 0;
  double mean = 0;
  /// Sample standard deviation; 0 for a single run.
  double sd = 0;
};

struct ExperimentResult {
  /// Ordered by (strategy, train config, repetition) in the order given.
  std::vector<CellResult> cells;

  /// Ordered by (strategy, train config) in the order given.
  std::vector<SummaryRow> summary() const {
    std::vector<SummaryRow> rows;
    std::vector<std::vector<double>> values;
    for (const auto& c : cells) {
      if (rows.empty() || c.rep == 0) {
        rows.push_back(SummaryRow{c.strategy, c.mode, c.dim});
        values.emplace_back();
      }
      if (c.accuracy) values.back().push_back(*c.accuracy);
      else ++rows.back().failures;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& v = values[i];
      rows[i].runs = v.size();
      if (v.empty()) continue;
      double sum = 0;
      for (const double x : v) sum += x;
      rows[i].mean = sum / static_cast<double>(v.size());
      if (v.size() > 1) {
        double ss = 0;
        for (const double x : v) ss += (x - rows[i].mean) * (x - rows[i].mean);
        rows[i].sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
      }
    }
    return rows;
  }
};

inline LabeledDataset load_source(const GraphSource& src, std::uint64_t graph_seed, PropertyGraph& g) {
  if (const auto* f = std::get_if<FileGraphSource>(&src)) {
    std::ifstream in(f->graph, std::ios::binary);
    if (!in) throw Error(Stage::ingest, "cannot open graph file: " + f->graph.string());
    g = ingest(in, f->ingest);
    return LabeledDataset{read_labels_file(f->train_labels), read_labels_file(f->test_labels)};
  }
  SynthResult r;
  if (const auto* a = std::get_if<AffiliationSynthConfig>(&src)) {
    auto cfg = *a;
    cfg.seed = graph_seed;
    r = generate_affiliation_graph(cfg);
  } else {
    auto cfg = std::get<HierarchySynthConfig>(src);
    cfg.seed = graph_seed;
    r = generate_hierarchy_graph(cfg);
  }
  g = std::move(r.graph);
  return std::move(r.dataset);
}

/// Every (strategy x train config x repetition) cell. A file source is
/// loaded once; a synthetic source is regenerated per repetition with that
/// repetition's graph seed. A failing cell records its error and the run
/// continues.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const std::size_t S = spec.strategies.size(), T = spec.train_configs.size(), R = spec.repetitions;

  struct RepData {
    PropertyGraph graph;
    LabeledDataset dataset;
    std::string error;
  };
  std::vector<RepData> reps(R);
  const bool from_file = std::holds_alternative<FileGraphSource>(spec.source);
  for (std::uint32_t r = 0; r < R; ++r) {
    try {
      if (from_file && r > 0) {
        reps[r].graph = reps[0].graph;
        reps[r].dataset = reps[0].dataset;
        reps[r].error = reps[0].error;
        continue;
      }
      reps[r].dataset = load_source(spec.source, repetition_seeds(spec.seed, r).graph, reps[r].graph);
    } catch (const std::exception& e) {
      reps[r].error = e.what();
    }
  }

  ExperimentResult result;
  result.cells.resize(S * T * R);
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t t = 0; t < T; ++t)
      for (std::uint32_t r = 0; r < R; ++r) {
        auto& c = result.cells[(s * T + t) * R + r];
        c.strategy = spec.strategies[s].name;
        c.mode = spec.train_configs[t].mode;
        c.dim = spec.train_configs[t].dim;
        c.rep = r;
      }

  auto run_cell = [&](std::size_t idx) {
    auto& c = result.cells[idx];
    const std::size_t s = idx / (T * R), t = (idx / R) % T;
    const auto& rep = reps[c.rep];
    if (!rep.error.empty()) {
      c.error = rep.error;
      return;
    }
    try {
      const RepSeeds seeds = repetition_seeds(spec.seed, c.rep);
      WalkConfig walk = spec.walk;
      walk.seed = seeds.walk;
      TrainConfig tc = spec.train_configs[t];
      tc.seed = seeds.train;
      const EdgeWeighter w = make_weighter(rep.graph, spec.strategies[s]);
      c.accuracy = run_in_memory(rep.graph, rep.dataset, w, walk, tc, spec.eval).accuracy;
    } catch (const std::exception& e) {
      c.error = e.what();
    }
  };

  const unsigned jobs = static_cast<unsigned>(std::min<std::size_t>(detail::resolve_workers(spec.jobs), result.cells.size()));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < result.cells.size(); ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < result.cells.size();) run_cell(i);
      });
  }
  return result;
}

namespace detail {

inline std::string fixed2(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

}  // namespace detail

/// Aligned text table: one row per (strategy, train config) with mean and
/// sample standard deviation over repetitions.
inline void write_table(const ExperimentResult& r, std::ostream& out) {
  const auto rows = r.summary();
  std::vector<std::array<std::string, 4>> cells{{"strategy", "mode", "dim", "accuracy (%)"}};
  for (const auto& row : rows) {
    std::string acc = row.runs ? detail::fixed2(row.mean) + " +- " + detail::fixed2(row.sd) : std::string("failed");
    if (row.failures) acc += " (" + std::to_string(row.failures) + " failed)";
    cells.push_back({row.strategy, std::string(train_mode_name(row.mode)), std::to_string(row.dim), acc});
  }
  std::array<std::size_t, 4> width{};
  for (const auto& c : cells)
    for (std::size_t i = 0; i < 4; ++i) width[i] = std::max(width[i], c[i].size());
  for (const auto& c : cells) {
    std::string line;
    for (std::size_t i = 0; i < 4; ++i) {
      line += c[i];
      if (i + 1 < 4) line += std::string(width[i] - c[i].size() + 2, ' ');
    }
    out << line << '\n';
  }
  for (const auto& c : r.cells)
    if (!c.accuracy)
      out << "error: " << c.strategy << ' ' << train_mode_name(c.mode) << ' ' << c.dim << " rep " << c.rep << ": "
          << c.error << '\n';
}

/// `strategy,mode,dim,rep,accuracy`; a failed cell has accuracy `error`.
inline void write_csv(const ExperimentResult& r, std::ostream& out) {
  out << "strategy,mode,dim,rep,accuracy\n";
  for (const auto& c : r.cells) {
    out << c.strategy << ',' << train_mode_name(c.mode) << ',' << c.dim << ',' << c.rep << ',';
    if (c.accuracy) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.4f", *c.accuracy);
      out << buf;
    } else {
      out << "error";
    }
    out << '\n';
  }
}

}  // namespace biaswalk
