// needpaths command-line pipeline: ingest, extract-paths, train, predict,
// eval, explain. Global flags: --config (JSON), --seed, --out, --verbose;
// stage flags override config keys one-for-one. Exit codes: 0 success,
// 1 runtime failure, 2 usage/config error.
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "needpaths/needpaths.hpp"

namespace {

struct Overrides {
  std::optional<std::string> config_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool verbose = false;

  std::optional<std::string> graph_dump, graph_cache, instances, embeddings, label_overrides;
  std::optional<std::string> label_theory, exception_preset, language_filter;
  std::optional<std::vector<std::string>> drop_labels;
  std::optional<double> min_weight, alpha, learning_rate, dropout, l2, threshold;
  std::optional<int> max_ngram, max_len, max_paths_per_pair, neighbor_cap, k, max_hops,
      enumeration_cap, jobs;
  std::optional<std::string> strategy, paths_mode;
  std::optional<std::size_t> hidden_size, gate_size, batch_size, epochs;
  bool dump_subgraphs = false;
};

needpaths::PipelineConfig effective_config(const Overrides& o) {
  needpaths::PipelineConfig c;
  if (o.config_file) c = needpaths::PipelineConfig::load_file(*o.config_file);
  auto set = [](auto& target, const auto& opt) {
    if (opt) target = *opt;
  };
  set(c.graph_dump, o.graph_dump);
  set(c.graph_cache, o.graph_cache);
  set(c.instances, o.instances);
  set(c.embeddings, o.embeddings);
  set(c.label_overrides, o.label_overrides);
  set(c.label_theory, o.label_theory);
  set(c.drop_labels, o.drop_labels);
  set(c.label_exception_preset, o.exception_preset);
  set(c.language_filter, o.language_filter);
  set(c.min_weight, o.min_weight);
  set(c.max_ngram, o.max_ngram);
  set(c.max_len, o.max_len);
  set(c.max_paths_per_pair, o.max_paths_per_pair);
  set(c.neighbor_cap, o.neighbor_cap);
  set(c.strategy, o.strategy);
  set(c.alpha, o.alpha);
  set(c.k, o.k);
  set(c.max_hops, o.max_hops);
  set(c.enumeration_cap, o.enumeration_cap);
  set(c.paths_mode, o.paths_mode);
  set(c.hidden_size, o.hidden_size);
  set(c.gate_size, o.gate_size);
  set(c.learning_rate, o.learning_rate);
  set(c.batch_size, o.batch_size);
  set(c.dropout, o.dropout);
  set(c.l2, o.l2);
  set(c.epochs, o.epochs);
  set(c.threshold, o.threshold);
  set(c.out_dir, o.out_dir);
  set(c.seed, o.seed);
  set(c.jobs, o.jobs);
  if (o.verbose) c.verbose = true;
  if (o.dump_subgraphs) c.dump_subgraphs = true;
  needpaths::parse_label_theory(c.label_theory);
  needpaths::parse_exception_preset(c.label_exception_preset);
  needpaths::parse_strategy(c.strategy);
  needpaths::parse_paths_mode(c.paths_mode);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"needpaths: knowledge-path extraction, ranking, and needs classification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", needpaths::kVersion);

  Overrides o;
  app.add_option("--config", o.config_file, "JSON config file");
  app.add_option("--seed", o.seed, "seed for every stochastic component");
  app.add_option("--out", o.out_dir, "output directory");
  app.add_flag("--verbose", o.verbose, "verbose progress output");

  auto add_input_flags = [&](CLI::App* cmd) {
    cmd->add_option("--graph", o.graph_dump, "graph dump file (TSV/CSV, optionally .gz)");
    cmd->add_option("--graph-cache", o.graph_cache, "binary graph cache path");
    cmd->add_option("--instances", o.instances, "instance JSONL file");
    cmd->add_option("--embeddings", o.embeddings, "word embedding text file");
  };
  auto add_label_flags = [&](CLI::App* cmd) {
    cmd->add_option("--label-theory", o.label_theory, "label inventory: maslow or reiss");
    cmd->add_option("--drop-labels", o.drop_labels, "labels removed from the inventory");
    cmd->add_option("--label-overrides", o.label_overrides, "label=concept override file");
    cmd->add_option("--exception-preset", o.exception_preset,
                    "label/concept exception direction: default or swapped");
  };

  CLI::App* ingest = app.add_subcommand("ingest", "build the graph and write the binary cache");
  add_input_flags(ingest);
  ingest->add_option("--language", o.language_filter, "language filter for graph URIs");
  ingest->add_option("--min-weight", o.min_weight, "minimum edge weight kept");

  CLI::App* extract =
      app.add_subcommand("extract-paths", "link concepts, induce subgraphs, rank paths");
  add_input_flags(extract);
  add_label_flags(extract);
  extract->add_option("--language", o.language_filter, "language filter for graph URIs");
  extract->add_option("--min-weight", o.min_weight, "minimum edge weight kept");
  extract->add_option("--max-ngram", o.max_ngram, "longest concept n-gram linked");
  extract->add_option("--max-len", o.max_len, "shortest-path length cap");
  extract->add_option("--max-paths-per-pair", o.max_paths_per_pair,
                      "shortest paths kept per seed pair");
  extract->add_option("--neighbor-cap", o.neighbor_cap,
                      "one-hop neighbors kept per vertex (0 = unlimited)");
  extract->add_option("--strategy", o.strategy,
                      "ranking strategy: none, random, cc, pr, ppr, cc+ppr");
  extract->add_option("--alpha", o.alpha, "PageRank damping factor");
  extract->add_option("--k", o.k, "paths kept per endpoint");
  extract->add_option("--max-hops", o.max_hops, "path enumeration hop cap");
  extract->add_option("--enumeration-cap", o.enumeration_cap,
                      "candidate paths kept per endpoint");
  extract->add_option("--paths", o.paths_mode, "path types emitted: cz, cc, or cz+cc");
  extract->add_option("--jobs", o.jobs, "worker threads (0 = available parallelism)");
  extract->add_flag("--dump-subgraphs", o.dump_subgraphs,
                    "write per-instance subgraph JSON dumps");

  CLI::App* train = app.add_subcommand("train", "train the classifier");
  add_input_flags(train);
  add_label_flags(train);
  train->add_option("--hidden-size", o.hidden_size, "LSTM hidden units per direction");
  train->add_option("--gate-size", o.gate_size, "dense/gate layer width");
  train->add_option("--lr", o.learning_rate, "learning rate");
  train->add_option("--batch-size", o.batch_size, "mini-batch size");
  train->add_option("--dropout", o.dropout, "dropout rate on encoder inputs");
  train->add_option("--l2", o.l2, "L2 regularization coefficient");
  train->add_option("--epochs", o.epochs, "training epochs");
  train->add_option("--threshold", o.threshold, "decision threshold");
  train->add_option("--k", o.k, "paths consumed per endpoint");

  CLI::App* predict = app.add_subcommand("predict", "write per-instance predictions");
  add_input_flags(predict);
  add_label_flags(predict);
  predict->add_option("--threshold", o.threshold, "decision threshold");

  CLI::App* eval = app.add_subcommand("eval", "score predictions against gold labels");
  add_input_flags(eval);
  add_label_flags(eval);

  std::string explain_instance;
  CLI::App* explain = app.add_subcommand("explain", "attention report for one instance");
  add_input_flags(explain);
  add_label_flags(explain);
  explain->add_option("instance_id", explain_instance, "instance to explain")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    needpaths::PipelineConfig config = effective_config(o);
    if (ingest->parsed()) return needpaths::cmd_ingest(config, std::cout);
    if (extract->parsed()) return needpaths::cmd_extract_paths(config, std::cout);
    if (train->parsed()) return needpaths::cmd_train(config, std::cout);
    if (predict->parsed()) return needpaths::cmd_predict(config, std::cout);
    if (eval->parsed()) return needpaths::cmd_eval(config, std::cout);
    if (explain->parsed()) return needpaths::cmd_explain(config, explain_instance, std::cout);
    std::cerr << "error: no command\n";
    return 2;
  } catch (const needpaths::config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
