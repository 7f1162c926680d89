// Command-line front end: ingest, walk, train, eval, synth, pipeline and
// experiment subcommands over the biaswalk library.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "biaswalk/biaswalk.hpp"

namespace bw = biaswalk;

namespace {

struct ParamArgs {
  std::vector<std::string> raw;

  bw::ParamOverrides parse() const {
    bw::ParamOverrides out;
    for (const auto& p : raw) {
      const auto eq = p.find('=');
      if (eq == std::string::npos || eq == 0) throw bw::ValidationError(bw::Stage::config, "expected NAME=VALUE: " + p);
      try {
        std::size_t used = 0;
        const double v = std::stod(p.substr(eq + 1), &used);
        if (used != p.size() - eq - 1) throw std::invalid_argument(p);
        out[p.substr(0, eq)] = v;
      } catch (const std::logic_error&) {
        throw bw::ValidationError(bw::Stage::config, "parameter value is not a number: " + p);
      }
    }
    return out;
  }
};

void add_walk_flags(CLI::App* cmd, bw::WalkConfig& cfg) {
  cmd->add_option("--walks-per-node", cfg.walks_per_node, "Walks rooted at each node")->capture_default_str();
  cmd->add_option("--max-depth", cfg.max_depth, "Maximum hops per walk")->capture_default_str();
  cmd->add_option("--depth-mode", cfg.depth_mode, "uniform: depth drawn from 1..max-depth; fixed: always max-depth")
      ->transform(CLI::CheckedTransformer(std::map<std::string, bw::DepthMode>{{"uniform", bw::DepthMode::uniform},
                                                                                {"fixed", bw::DepthMode::fixed}}))
      ->default_str(std::string(bw::depth_mode_name(cfg.depth_mode)));
  cmd->add_flag("!--no-edge-labels", cfg.emit_edge_labels, "Emit node tokens only");
  cmd->add_option("--walk-workers", cfg.workers, "Walk threads (0 = all cores); output does not depend on it")
      ->capture_default_str();
  cmd->add_flag("--cache-weights", cfg.cache_weights, "Evaluate every edge weight once up front");
}

void add_train_flags(CLI::App* cmd, bw::TrainConfig& cfg) {
  cmd->add_option("--mode", cfg.mode, "cbow or skipgram")
      ->transform(CLI::CheckedTransformer(std::map<std::string, bw::TrainMode>{{"cbow", bw::TrainMode::cbow},
                                                                                {"skipgram", bw::TrainMode::skipgram}}))
      ->default_str(std::string(bw::train_mode_name(cfg.mode)));
  cmd->add_option("--dim", cfg.dim, "Embedding dimension")->capture_default_str();
  cmd->add_option("--window", cfg.window, "Maximum context window")->capture_default_str();
  cmd->add_option("--epochs", cfg.epochs, "Passes over the corpus")->capture_default_str();
  cmd->add_option("--negatives", cfg.negatives, "Negative samples per positive")->capture_default_str();
  cmd->add_option("--lr", cfg.lr_start, "Initial learning rate")->capture_default_str();
  cmd->add_option("--lr-end", cfg.lr_end, "Final learning rate")->capture_default_str();
  cmd->add_option("--min-count", cfg.min_count, "Drop tokens rarer than this")->capture_default_str();
  cmd->add_option("--subsample", cfg.subsample, "Frequent-token downsampling threshold (0 = off)")
      ->capture_default_str();
  cmd->add_flag("--deterministic", cfg.deterministic, "Single update stream, reproducible output");
  cmd->add_option("--train-workers", cfg.workers, "Training threads when not deterministic (0 = all cores)")
      ->capture_default_str();
}

void add_eval_flags(CLI::App* cmd, bw::EvalConfig& cfg) {
  cmd->add_option("--k", cfg.k, "Neighbors")->capture_default_str();
  cmd->add_option("--metric", cfg.metric, "euclidean or cosine")
      ->transform(CLI::CheckedTransformer(std::map<std::string, bw::Metric>{{"euclidean", bw::Metric::euclidean},
                                                                             {"cosine", bw::Metric::cosine}}))
      ->default_str(std::string(bw::metric_name(cfg.metric)));
}

void add_ingest_flags(CLI::App* cmd, std::vector<std::string>& type_predicates, bw::LiteralPolicy& literals,
                      bool& lenient) {
  cmd->add_option("--type-predicate", type_predicates, "Predicate(s) that assign node types")
      ->default_str(std::string(bw::rdf_type_iri));
  cmd->add_option("--literals", literals, "drop literal objects or keep them as terminal nodes")
      ->transform(CLI::CheckedTransformer(std::map<std::string, bw::LiteralPolicy>{
          {"drop", bw::LiteralPolicy::drop}, {"keep", bw::LiteralPolicy::as_terminal_node}}))
      ->default_str(literals == bw::LiteralPolicy::drop ? "drop" : "keep");
  cmd->add_flag("--lenient", lenient, "Skip malformed lines with a warning instead of failing");
}

bw::IngestOptions make_ingest(const std::vector<std::string>& type_predicates, bw::LiteralPolicy literals,
                              bool lenient) {
  bw::IngestOptions opt;
  if (!type_predicates.empty()) opt.build.type_predicates = {type_predicates.begin(), type_predicates.end()};
  opt.build.literals = literals;
  opt.lenient = lenient;
  return opt;
}

void add_affiliation_flags(CLI::App* cmd, bw::AffiliationSynthConfig& c) {
  cmd->add_option("--groups", c.groups, "Research groups (classes)")->capture_default_str();
  cmd->add_option("--persons-per-group", c.persons_per_group, "Persons per group")->capture_default_str();
  cmd->add_option("--projects-per-group", c.projects_per_group, "Projects per group")->capture_default_str();
  cmd->add_option("--topics-per-group", c.topics_per_group, "Research topics per group")->capture_default_str();
  cmd->add_option("--publications", c.publications, "Publications")->capture_default_str();
  cmd->add_option("--external-author-fraction", c.external_author_fraction, "Probability of an extra external author per publication")->capture_default_str();
  cmd->add_option("--cross-group-pub-fraction", c.cross_group_pub_fraction, "Probability that a second author comes from another group")->capture_default_str();
  cmd->add_option("--external-authors", c.external_authors, "Size of the external author pool")->capture_default_str();
}

void add_hierarchy_flags(CLI::App* cmd, bw::HierarchySynthConfig& c) {
  cmd->add_option("--concept-tree-depth", c.concept_tree_depth, "Levels below the root concept")->capture_default_str();
  cmd->add_option("--branching", c.branching, "Children per concept")->capture_default_str();
  cmd->add_option("--rock-units", c.rock_units, "Rock units attached below leaf concepts")->capture_default_str();
  cmd->add_option("--lithogenesis-classes", c.lithogenesis_classes, "Lithogenesis classes")->capture_default_str();
  cmd->add_option("--label-from-ancestor-prob", c.label_from_ancestor_prob, "Probability that a concept links to its class")->capture_default_str();
  cmd->add_option("--noise-links-per-unit", c.noise_links_per_unit, "Attribute links per rock unit")->capture_default_str();
  cmd->add_option("--attribute-values", c.attribute_values, "Shared attribute values")->capture_default_str();
}

template <class Fn>
void write_file(const std::string& path, bw::Stage stage, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw bw::Error(stage, "cannot write " + path);
  fn(out);
  if (!out) throw bw::Error(stage, "failed writing " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Biased random walks over RDF graphs, word2vec embeddings and k-NN evaluation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI-style file of flag=value lines; [section] per subcommand");
  app.option_defaults()->always_capture_default();

  std::uint64_t seed = 0;
  bool seed_given = false;
  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t s) { seed = s, seed_given = true; }, "Random seed");
  };

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Parse N-Triples into a graph snapshot");
  std::string ingest_in, ingest_out;
  std::vector<std::string> type_predicates;
  auto literals = bw::LiteralPolicy::drop;
  bool lenient = false;
  ingest->add_option("--input", ingest_in, "N-Triples file")->required();
  ingest->add_option("--out", ingest_out, "Snapshot file")->required();
  add_ingest_flags(ingest, type_predicates, literals, lenient);

  // walk
  auto* walk = app.add_subcommand("walk", "Generate a biased walk corpus from a snapshot");
  std::string walk_graph, walk_out, strategy_text = "uniform";
  ParamArgs params;
  bw::WalkConfig walk_cfg;
  walk->add_option("--graph", walk_graph, "Snapshot file")->required();
  walk->add_option("--strategy", strategy_text, "Builtin strategy name or rules:FILE")->capture_default_str();
  walk->add_option("--param", params.raw, "Rule parameter override NAME=VALUE (repeatable)");
  walk->add_option("--out", walk_out, "Corpus file")->required();
  add_walk_flags(walk, walk_cfg);
  add_seed(walk);

  // train
  auto* train = app.add_subcommand("train", "Train word2vec embeddings on a corpus");
  std::string train_corpus, train_out;
  bw::TrainConfig train_cfg;
  train->add_option("--corpus", train_corpus, "Corpus file")->required();
  train->add_option("--out", train_out, "Embeddings file")->required();
  add_train_flags(train, train_cfg);
  add_seed(train);

  // eval
  auto* eval = app.add_subcommand("eval", "k-NN classification accuracy of embeddings");
  std::string eval_vectors, eval_train, eval_test;
  bw::EvalConfig eval_cfg;
  eval->add_option("--vectors", eval_vectors, "Embeddings file")->required();
  eval->add_option("--train", eval_train, "Training labels TSV")->required();
  eval->add_option("--test", eval_test, "Test labels TSV")->required();
  add_eval_flags(eval, eval_cfg);

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic labeled graph");
  synth->require_subcommand(1);
  std::string out_graph, out_train, out_test;
  bw::AffiliationSynthConfig aff_cfg;
  bw::HierarchySynthConfig hier_cfg;
  auto* synth_aff = synth->add_subcommand("affiliation", "Research groups, persons, projects and publications");
  auto* synth_hier = synth->add_subcommand("hierarchy", "Concept hierarchy with rock units and lithogenesis classes");
  add_affiliation_flags(synth_aff, aff_cfg);
  add_hierarchy_flags(synth_hier, hier_cfg);
  for (auto* cmd : {synth_aff, synth_hier}) {
    cmd->add_option("--out-graph", out_graph, "N-Triples output")->required();
    cmd->add_option("--out-train", out_train, "Training labels TSV")->required();
    cmd->add_option("--out-test", out_test, "Test labels TSV")->required();
    add_seed(cmd);
  }

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "ingest, walk, train and eval in one go");
  bw::PipelineSpec pspec;
  std::string pipe_graph, pipe_train, pipe_test, pipe_workdir;
  pipeline->add_option("--graph", pipe_graph, "N-Triples file")->required();
  pipeline->add_option("--train", pipe_train, "Training labels TSV")->required();
  pipeline->add_option("--test", pipe_test, "Test labels TSV")->required();
  pipeline->add_option("--workdir", pipe_workdir, "Directory for intermediate artifacts")->required();
  pipeline->add_option("--strategy", strategy_text, "Builtin strategy name or rules:FILE")->capture_default_str();
  pipeline->add_option("--param", params.raw, "Rule parameter override NAME=VALUE (repeatable)");
  add_ingest_flags(pipeline, type_predicates, literals, lenient);
  add_walk_flags(pipeline, walk_cfg);
  add_train_flags(pipeline, train_cfg);
  add_eval_flags(pipeline, eval_cfg);
  add_seed(pipeline);

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Compare strategies over repeated seeds");
  std::string exp_synth, exp_graph, exp_train, exp_test, exp_csv;
  std::vector<std::string> exp_strategies, exp_params, exp_modes{"cbow"};
  std::vector<std::size_t> exp_dims;
  std::uint32_t reps = 1;
  unsigned jobs = 1;
  experiment->add_option("--synth", exp_synth, "Synthetic source: affiliation or hierarchy")
      ->check(CLI::IsMember({"affiliation", "hierarchy"}));
  experiment->add_option("--graph", exp_graph, "N-Triples file (instead of --synth)");
  experiment->add_option("--train", exp_train, "Training labels TSV");
  experiment->add_option("--test", exp_test, "Test labels TSV");
  experiment->add_option("--strategy", exp_strategies, "[NAME=]SOURCE, repeatable; SOURCE is a builtin or rules:FILE")
      ->required();
  experiment->add_option("--param", exp_params, "STRATEGY:NAME=VALUE rule override (repeatable)");
  experiment->add_option("--modes", exp_modes, "Train modes to compare")
      ->check(CLI::IsMember({"cbow", "skipgram"}))
      ->delimiter(',');
  experiment->add_option("--dims", exp_dims, "Embedding dimensions to compare (default: --dim)")->delimiter(',');
  experiment->add_option("--reps", reps, "Repetitions per cell")->capture_default_str();
  experiment->add_option("--jobs", jobs, "Cells run in parallel (0 = all cores)")->capture_default_str();
  experiment->add_option("--csv", exp_csv, "Write per-cell rows as CSV to this file");
  add_ingest_flags(experiment, type_predicates, literals, lenient);
  add_affiliation_flags(experiment, aff_cfg);
  add_hierarchy_flags(experiment, hier_cfg);
  add_walk_flags(experiment, walk_cfg);
  add_train_flags(experiment, train_cfg);
  add_eval_flags(experiment, eval_cfg);
  add_seed(experiment);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*ingest) {
      const auto s = bw::ingest_file(ingest_in, ingest_out, make_ingest(type_predicates, literals, lenient));
      std::cout << "triples=" << s.triples << " skipped=" << s.skipped << " nodes=" << s.nodes
                << " edges=" << s.edges << '\n';
    } else if (*walk) {
      auto spec = bw::parse_strategy_spec(strategy_text);
      spec.overrides = params.parse();
      walk_cfg.seed = seed;
      const auto n = bw::walk_file(walk_graph, spec, walk_cfg, walk_out);
      std::cout << "walks=" << n << '\n';
    } else if (*train) {
      train_cfg.seed = seed_given ? seed : train_cfg.seed;
      const auto n = bw::train_file(train_corpus, train_cfg, train_out);
      std::cout << "vectors=" << n << " dim=" << train_cfg.dim << '\n';
    } else if (*eval) {
      bw::print_report(bw::eval_files(eval_vectors, eval_train, eval_test, eval_cfg), std::cout);
    } else if (*synth) {
      bw::SynthResult r;
      if (*synth_aff) {
        if (seed_given) aff_cfg.seed = seed;
        r = bw::generate_affiliation_graph(aff_cfg);
      } else {
        if (seed_given) hier_cfg.seed = seed;
        r = bw::generate_hierarchy_graph(hier_cfg);
      }
      write_file(out_graph, bw::Stage::synth, [&](std::ostream& o) { bw::write_ntriples(o, r.triples); });
      write_file(out_train, bw::Stage::synth, [&](std::ostream& o) { bw::write_labels(o, r.dataset.train); });
      write_file(out_test, bw::Stage::synth, [&](std::ostream& o) { bw::write_labels(o, r.dataset.test); });
      std::cout << "nodes=" << r.graph.node_count() << " edges=" << r.graph.edge_count()
                << " train=" << r.dataset.train.size() << " test=" << r.dataset.test.size() << '\n';
    } else if (*pipeline) {
      pspec.graph = pipe_graph;
      pspec.train_labels = pipe_train;
      pspec.test_labels = pipe_test;
      pspec.workdir = pipe_workdir;
      pspec.strategy = bw::parse_strategy_spec(strategy_text);
      pspec.strategy.overrides = params.parse();
      pspec.ingest = make_ingest(type_predicates, literals, lenient);
      pspec.walk = walk_cfg;
      pspec.walk.seed = seed;
      pspec.train = train_cfg;
      if (seed_given) pspec.train.seed = seed;
      pspec.eval = eval_cfg;
      bw::print_report(bw::run_pipeline(pspec), std::cout);
    } else if (*experiment) {
      bw::ExperimentSpec spec;
      if (!exp_synth.empty() == !exp_graph.empty())
        throw bw::ValidationError(bw::Stage::config, "experiment needs exactly one of --synth or --graph");
      if (exp_synth == "affiliation") spec.source = aff_cfg;
      else if (exp_synth == "hierarchy") spec.source = hier_cfg;
      else {
        if (exp_train.empty() || exp_test.empty())
          throw bw::ValidationError(bw::Stage::config, "--graph needs --train and --test");
        spec.source = bw::FileGraphSource{exp_graph, exp_train, exp_test, make_ingest(type_predicates, literals, lenient)};
      }
      for (const auto& s : exp_strategies) spec.strategies.push_back(bw::parse_strategy_spec(s));
      for (const auto& p : exp_params) {
        const auto colon = p.find(':');
        if (colon == std::string::npos) throw bw::ValidationError(bw::Stage::config, "expected STRATEGY:NAME=VALUE: " + p);
        const std::string target = p.substr(0, colon);
        bool found = false;
        for (auto& s : spec.strategies) {
          if (s.name != target) continue;
          for (const auto& [k, v] : ParamArgs{{p.substr(colon + 1)}}.parse()) s.overrides[k] = v;
          found = true;
        }
        if (!found) throw bw::ValidationError(bw::Stage::config, "--param names an unknown strategy: " + target);
      }
      if (exp_dims.empty()) exp_dims.push_back(train_cfg.dim);
      spec.train_configs.clear();
      for (const auto& m : exp_modes)
        for (const auto d : exp_dims) {
          auto tc = train_cfg;
          tc.mode = *bw::parse_train_mode(m);
          tc.dim = d;
          spec.train_configs.push_back(tc);
        }
      spec.walk = walk_cfg;
      spec.eval = eval_cfg;
      spec.repetitions = reps;
      spec.seed = seed;
      spec.jobs = jobs;
      const auto result = bw::run_experiment(spec);
      bw::write_table(result, std::cout);
      if (!exp_csv.empty())
        write_file(exp_csv, bw::Stage::config, [&](std::ostream& o) { bw::write_csv(result, o); });
    }
  } catch (const bw::Error& e) {
    std::cerr << "error [" << bw::stage_name(e.stage()) << "]: " << e.what() << '\n';
    return bw::exit_code(e.stage());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
