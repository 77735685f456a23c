// Pipeline orchestration: configuration loading, the six commands (ingest,
// extract-paths, train, predict, eval, explain), artifact layout inside the
// output directory, and the bounded worker pool for path extraction. Every
// command is deterministic given (config, inputs, seed).
#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "needpaths/common.hpp"
#include "needpaths/embeddings.hpp"
#include "needpaths/kg.hpp"
#include "needpaths/linking.hpp"
#include "needpaths/manifest.hpp"
#include "needpaths/metrics.hpp"
#include "needpaths/model.hpp"
#include "needpaths/paths.hpp"
#include "needpaths/ranking.hpp"
#include "needpaths/scoring.hpp"
#include "needpaths/subgraph.hpp"

namespace needpaths {

enum class PathsMode { kConceptNeedOnly, kConceptConceptOnly, kBoth };

inline PathsMode parse_paths_mode(const std::string& name) {
  if (name == "cz") return PathsMode::kConceptNeedOnly;
  if (name == "cc") return PathsMode::kConceptConceptOnly;
  if (name == "cz+cc") return PathsMode::kBoth;
  throw config_error("unknown paths mode: " + name + " (expected cz, cc, or cz+cc)");
}

inline const char* paths_mode_name(PathsMode m) {
  switch (m) {
    case PathsMode::kConceptNeedOnly: return "cz";
    case PathsMode::kConceptConceptOnly: return "cc";
    case PathsMode::kBoth: return "cz+cc";
  }
  return "?";
}

struct PipelineConfig {
  // Input files.
  std::string graph_dump;
  std::string graph_cache;  // defaults to <out_dir>/graph.npgc
  std::string instances;
  std::string embeddings;
  std::string label_overrides;  // optional

  // Labels.
  std::string label_theory = "maslow";
  std::vector<std::string> drop_labels;
  std::string label_exception_preset = "default";

  // Graph ingest.
  std::string language_filter = "en";
  double min_weight = 0.0;

  // Concept linking.
  int max_ngram = 3;

  // Subgraph induction.
  int max_len = 4;
  int max_paths_per_pair = 10;
  int neighbor_cap = 0;  // 0 = unlimited

  // Path ranking.
  std::string strategy = "cc+ppr";
  double alpha = 0.85;
  int k = 3;
  int max_hops = 4;
  int enumeration_cap = 1000;
  std::string paths_mode = "cz+cc";

  // Model.
  std::size_t hidden_size = 100;
  std::size_t gate_size = 100;
  double learning_rate = 0.001;
  std::size_t batch_size = 32;
  double dropout = 0.5;
  double l2 = 0.01;
  std::size_t epochs = 50;
  double threshold = 0.5;

  // Run.
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int jobs = 0;  // extract-paths worker count; 0 = available parallelism
  bool verbose = false;
  bool dump_subgraphs = false;

  // ---- derived paths inside out_dir ----
  std::string graph_cache_path() const {
    return graph_cache.empty() ? out_dir + "/graph.npgc" : graph_cache;
  }
  std::string ranked_paths_path() const { return out_dir + "/ranked_paths.jsonl"; }
  std::string model_path() const { return out_dir + "/model.npmd"; }
  std::string loss_log_path() const { return out_dir + "/loss_log.json"; }
  std::string predictions_path() const { return out_dir + "/predictions.jsonl"; }
  std::string metrics_json_path() const { return out_dir + "/metrics.json"; }
  std::string metrics_table_path() const { return out_dir + "/metrics.txt"; }
  std::string trace_path(const std::string& instance_id) const {
    return out_dir + "/trace_" + instance_id + ".json";
  }
  std::string subgraph_path(const std::string& instance_id) const {
    return out_dir + "/subgraph_" + instance_id + ".json";
  }

  LabelSet active_label_set() const {
    std::set<std::string> drop(drop_labels.begin(), drop_labels.end());
    return LabelSet::make(parse_label_theory(label_theory)).without(drop);
  }

  RankingConfig ranking_config(std::uint64_t effective_seed) const {
    RankingConfig rc;
    rc.strategy = parse_strategy(strategy);
    rc.alpha = alpha;
    rc.k = k;
    rc.max_hops = max_hops;
    rc.enumeration_cap = enumeration_cap;
    rc.seed = effective_seed;
    return rc;
  }

  ModelConfig model_config(const LabelSet& labels, std::size_t embedding_dim) const {
    ModelConfig mc;
    mc.hidden_size = hidden_size;
    mc.gate_size = gate_size;
    mc.embedding_dim = embedding_dim;
    mc.labels = labels.labels;
    mc.learning_rate = learning_rate;
    mc.batch_size = batch_size;
    mc.dropout = dropout;
    mc.l2 = l2;
    mc.epochs = epochs;
    mc.seed = seed;
    mc.k = k;
    mc.threshold = threshold;
    mc.validate();
    return mc;
  }

  nlohmann::json to_json() const {
    return {{"graph_dump", graph_dump},
            {"graph_cache", graph_cache},
            {"instances", instances},
            {"embeddings", embeddings},
            {"label_overrides", label_overrides},
            {"label_theory", label_theory},
            {"drop_labels", drop_labels},
            {"label_exception_preset", label_exception_preset},
            {"language_filter", language_filter},
            {"min_weight", min_weight},
            {"max_ngram", max_ngram},
            {"subgraph",
             {{"max_len", max_len},
              {"max_paths_per_pair", max_paths_per_pair},
              {"neighbor_cap", neighbor_cap}}},
            {"ranking",
             {{"strategy", strategy},
              {"alpha", alpha},
              {"k", k},
              {"max_hops", max_hops},
              {"enumeration_cap", enumeration_cap},
              {"paths", paths_mode}}},
            {"model",
             {{"hidden_size", hidden_size},
              {"gate_size", gate_size},
              {"learning_rate", learning_rate},
              {"batch_size", batch_size},
              {"dropout", dropout},
              {"l2", l2},
              {"epochs", epochs},
              {"threshold", threshold}}},
            {"out_dir", out_dir},
            {"seed", seed},
            {"jobs", jobs},
            {"dump_subgraphs", dump_subgraphs}};
  }

  static PipelineConfig from_json(const nlohmann::json& j);
  static PipelineConfig load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw config_error("config file " + path + " is not valid JSON: " + e.what());
    }
    return from_json(j);
  }
};

namespace detail {

template <typename T>
void read_key(const nlohmann::json& j, const char* key, T& into) {
  if (auto it = j.find(key); it != j.end()) {
    try {
      into = it->get<T>();
    } catch (const nlohmann::json::exception&) {
      throw config_error(std::string("config key '") + key + "' has the wrong type");
    }
  }
}

inline void reject_unknown(const nlohmann::json& j, const std::vector<std::string>& known,
                           const std::string& scope) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw config_error("unknown config key" + (scope.empty() ? "" : " in " + scope) + ": " +
                         it.key());
    }
  }
}

inline void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw config_error("no " + what + " file configured");
  if (!std::filesystem::exists(path)) {
    throw config_error(what + " file does not exist: " + path);
  }
}

}  // namespace detail

inline PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw config_error("config root must be a JSON object");
  detail::reject_unknown(
      j,
      {"graph_dump", "graph_cache", "instances", "embeddings", "label_overrides", "label_theory",
       "drop_labels", "label_exception_preset", "language_filter", "min_weight", "max_ngram",
       "subgraph", "ranking", "model", "out_dir", "seed", "jobs", "dump_subgraphs"},
      "");
  PipelineConfig c;
  detail::read_key(j, "graph_dump", c.graph_dump);
  detail::read_key(j, "graph_cache", c.graph_cache);
  detail::read_key(j, "instances", c.instances);
  detail::read_key(j, "embeddings", c.embeddings);
  detail::read_key(j, "label_overrides", c.label_overrides);
  detail::read_key(j, "label_theory", c.label_theory);
  detail::read_key(j, "drop_labels", c.drop_labels);
  detail::read_key(j, "label_exception_preset", c.label_exception_preset);
  detail::read_key(j, "language_filter", c.language_filter);
  detail::read_key(j, "min_weight", c.min_weight);
  detail::read_key(j, "max_ngram", c.max_ngram);
  if (auto it = j.find("subgraph"); it != j.end()) {
    detail::reject_unknown(*it, {"max_len", "max_paths_per_pair", "neighbor_cap"}, "subgraph");
    detail::read_key(*it, "max_len", c.max_len);
    detail::read_key(*it, "max_paths_per_pair", c.max_paths_per_pair);
    detail::read_key(*it, "neighbor_cap", c.neighbor_cap);
  }
  if (auto it = j.find("ranking"); it != j.end()) {
    detail::reject_unknown(*it, {"strategy", "alpha", "k", "max_hops", "enumeration_cap", "paths"},
                           "ranking");
    detail::read_key(*it, "strategy", c.strategy);
    detail::read_key(*it, "alpha", c.alpha);
    detail::read_key(*it, "k", c.k);
    detail::read_key(*it, "max_hops", c.max_hops);
    detail::read_key(*it, "enumeration_cap", c.enumeration_cap);
    detail::read_key(*it, "paths", c.paths_mode);
  }
  if (auto it = j.find("model"); it != j.end()) {
    detail::reject_unknown(*it,
                           {"hidden_size", "gate_size", "learning_rate", "batch_size", "dropout",
                            "l2", "epochs", "threshold"},
                           "model");
    detail::read_key(*it, "hidden_size", c.hidden_size);
    detail::read_key(*it, "gate_size", c.gate_size);
    detail::read_key(*it, "learning_rate", c.learning_rate);
    detail::read_key(*it, "batch_size", c.batch_size);
    detail::read_key(*it, "dropout", c.dropout);
    detail::read_key(*it, "l2", c.l2);
    detail::read_key(*it, "epochs", c.epochs);
    detail::read_key(*it, "threshold", c.threshold);
  }
  detail::read_key(j, "out_dir", c.out_dir);
  detail::read_key(j, "seed", c.seed);
  detail::read_key(j, "jobs", c.jobs);
  detail::read_key(j, "dump_subgraphs", c.dump_subgraphs);
  // Validate enumerated values eagerly so typos fail before any compute.
  parse_label_theory(c.label_theory);
  parse_exception_preset(c.label_exception_preset);
  parse_strategy(c.strategy);
  parse_paths_mode(c.paths_mode);
  return c;
}

// --- shared loading helpers ---------------------------------------------------

namespace detail {

inline KnowledgeGraph load_graph(const PipelineConfig& config, std::ostream& log) {
  const std::string cache = config.graph_cache_path();
  if (std::filesystem::exists(cache)) {
    if (config.verbose) log << "loading graph cache " << cache << "\n";
    return KnowledgeGraph::load_cache(cache);
  }
  detail::require_file(config.graph_dump, "graph dump");
  if (config.verbose) log << "ingesting graph dump " << config.graph_dump << "\n";
  IngestReport report;
  return ingest_edges(config.graph_dump, config.language_filter, config.min_weight, &report);
}

inline std::vector<Instance> load_instances_file(const std::string& path,
                                                 const LabelSet& label_set,
                                                 const std::set<std::string>& drop) {
  detail::require_file(path, "instance");
  std::ifstream in(path);
  if (!in) throw config_error("cannot open instance file: " + path);
  return load_instances(in, label_set, drop);
}

inline std::vector<RankedPathList> load_ranked_paths_file(const std::string& path) {
  detail::require_file(path, "ranked paths");
  std::ifstream in(path);
  if (!in) throw config_error("cannot open ranked paths file: " + path);
  return ranked_paths_from_jsonl(in);
}

inline void ensure_out_dir(const PipelineConfig& config) {
  std::filesystem::create_directories(config.out_dir);
}

}  // namespace detail

// --- commands ------------------------------------------------------------------

// Builds the graph from the dump (or loads the cache), writes the cache, and
// prints vertex/edge counts.
inline int cmd_ingest(const PipelineConfig& config, std::ostream& out) {
  detail::ensure_out_dir(config);
  RunManifest manifest("ingest", config.to_json());
  const std::string cache = config.graph_cache_path();
  KnowledgeGraph graph;
  if (std::filesystem::exists(cache)) {
    graph = KnowledgeGraph::load_cache(cache);
    out << "graph cache " << cache << ": |V|=" << graph.vertex_count()
        << " |E|=" << graph.edge_count() << "\n";
    manifest.add_input(cache);
  } else {
    detail::require_file(config.graph_dump, "graph dump");
    manifest.add_input(config.graph_dump);
    IngestReport report;
    graph = ingest_edges(config.graph_dump, config.language_filter, config.min_weight, &report);
    graph.save_cache(cache);
    out << "ingested " << config.graph_dump << ": |V|=" << graph.vertex_count()
        << " |E|=" << graph.edge_count() << " (lines=" << report.lines_read
        << " malformed=" << report.records_malformed << " filtered=" << report.records_filtered
        << " duplicates=" << report.duplicates_collapsed
        << " self_loops=" << report.self_loops_dropped << ")\n";
    if (config.verbose) {
      for (const auto& w : report.warnings) out << "warning: " << w << "\n";
    }
    manifest.add_output(cache);
  }
  manifest.write(config.out_dir);
  return 0;
}

// Per-instance path extraction: link -> induce -> score -> enumerate -> rank,
// processed by a bounded worker pool; output lines follow instance order.
inline int cmd_extract_paths(const PipelineConfig& config, std::ostream& out) {
  detail::ensure_out_dir(config);
  RunManifest manifest("extract-paths", config.to_json());

  KnowledgeGraph graph = detail::load_graph(config, out);
  if (std::filesystem::exists(config.graph_cache_path())) {
    manifest.add_input(config.graph_cache_path());
  } else if (!config.graph_dump.empty()) {
    manifest.add_input(config.graph_dump);
  }

  const LabelSet active = config.active_label_set();
  std::set<std::string> drop(config.drop_labels.begin(), config.drop_labels.end());
  auto instances = detail::load_instances_file(config.instances, active, drop);
  manifest.add_input(config.instances);

  LabelConceptMap overrides;
  if (!config.label_overrides.empty()) {
    detail::require_file(config.label_overrides, "label overrides");
    std::ifstream ov(config.label_overrides);
    overrides = parse_overrides(ov);
    manifest.add_input(config.label_overrides);
  }
  LabelConceptMap concept_map =
      label_concepts(active, overrides, parse_exception_preset(config.label_exception_preset));
  for (const auto& w : missing_concept_warnings(concept_map, graph)) {
    out << "warning: " << w << "\n";
  }
  // Need concepts in label order, deduplicated, restricted to the graph.
  std::vector<std::string> need_concepts;
  for (const auto& label : active.labels) {
    const std::string& c = concept_map.at(label);
    if (graph.contains(c) &&
        std::find(need_concepts.begin(), need_concepts.end(), c) == need_concepts.end()) {
      need_concepts.push_back(c);
    }
  }

  const PathsMode mode = parse_paths_mode(config.paths_mode);
  const std::size_t n = instances.size();
  std::vector<std::string> chunks(n);
  std::vector<std::string> subgraph_dumps(n);
  std::vector<int> no_concept_flags(n, 0);
  std::vector<std::exception_ptr> failures(n);

  auto process = [&](std::size_t i) {
    const Instance& inst = instances[i];
    SeedSet seeds;
    seeds.text_concepts = link_text(inst.linkable_tokens(), graph, config.max_ngram);
    seeds.need_concepts = need_concepts;
    if (seeds.text_concepts.empty()) {
      no_concept_flags[i] = 1;
      return;  // no linked concepts: no endpoints, empty path list
    }
    SubGraph sub = induce(graph, seeds, config.max_len, config.max_paths_per_pair,
                          config.neighbor_cap);
    if (config.dump_subgraphs) {
      subgraph_dumps[i] = sub.to_json().dump(2) + "\n";
    }
    auto candidates = enumerate_paths(sub, seeds, config.max_hops,
                                      static_cast<std::size_t>(config.enumeration_cap));
    if (mode != PathsMode::kBoth) {
      const PathType want = mode == PathsMode::kConceptNeedOnly ? PathType::kConceptNeed
                                                                : PathType::kConceptConcept;
      std::vector<KnowledgePath> kept;
      for (auto& p : candidates) {
        if (p.type == want) kept.push_back(std::move(p));
      }
      candidates = std::move(kept);
    }
    RankingConfig rc = config.ranking_config(config.seed ^ fnv1a(inst.instance_id));
    RankedPathList ranked = rank_and_select(inst.instance_id, std::move(candidates), sub, seeds, rc);
    chunks[i] = ranked_paths_to_jsonl(ranked);
  };

  unsigned jobs = config.jobs > 0 ? static_cast<unsigned>(config.jobs)
                                  : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1)));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        process(i);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w) {
      pool.emplace_back([&]() {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          try {
            process(i);
          } catch (...) {
            failures[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (failures[i]) std::rethrow_exception(failures[i]);
  }

  const std::string out_path = config.ranked_paths_path();
  {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw data_error("cannot write ranked paths file: " + out_path);
    for (const auto& chunk : chunks) f << chunk;
  }
  if (config.dump_subgraphs) {
    for (std::size_t i = 0; i < n; ++i) {
      if (subgraph_dumps[i].empty()) continue;
      const std::string p = config.subgraph_path(instances[i].instance_id);
      std::ofstream f(p, std::ios::binary);
      if (!f) throw data_error("cannot write subgraph dump: " + p);
      f << subgraph_dumps[i];
    }
  }

  std::size_t total_groups = 0, no_concepts = 0;
  for (const auto& c : chunks) {
    total_groups += static_cast<std::size_t>(std::count(c.begin(), c.end(), '\n'));
  }
  for (int f : no_concept_flags) no_concepts += static_cast<std::size_t>(f);
  out << "extracted paths for " << n << " instances -> " << out_path << " (" << total_groups
      << " endpoint groups";
  if (no_concepts > 0) {
    out << "; warning: " << no_concepts << " instances had no linked concepts";
  }
  out << ")\n";
  manifest.add_output(out_path);
  manifest.write(config.out_dir);
  return 0;
}

// Trains the classifier on instances + ranked paths and writes the model file
// and per-epoch loss log.
inline int cmd_train(const PipelineConfig& config, std::ostream& out) {
  detail::ensure_out_dir(config);
  RunManifest manifest("train", config.to_json());

  const LabelSet active = config.active_label_set();
  std::set<std::string> drop(config.drop_labels.begin(), config.drop_labels.end());
  auto instances = detail::load_instances_file(config.instances, active, drop);
  manifest.add_input(config.instances);

  detail::require_file(config.embeddings, "embedding");
  std::vector<std::string> warnings;
  EmbeddingTable table = EmbeddingTable::load_file(config.embeddings, &warnings);
  for (const auto& w : warnings) out << "warning: " << w << "\n";
  manifest.add_input(config.embeddings);

  auto ranked = detail::load_ranked_paths_file(config.ranked_paths_path());
  manifest.add_input(config.ranked_paths_path());

  ModelConfig mc = config.model_config(active, table.dim());
  auto log_epoch = [&](std::size_t epoch, double loss, ModelParams&) {
    if (config.verbose) out << "epoch " << epoch << " loss " << loss << "\n";
  };
  TrainResult result = train(mc, active, instances, ranked, table, log_epoch);

  result.params.save_file(config.model_path());
  {
    std::ofstream f(config.loss_log_path(), std::ios::binary);
    if (!f) throw data_error("cannot write loss log: " + config.loss_log_path());
    f << nlohmann::json(result.loss_log).dump(2) << "\n";
  }
  out << "trained " << mc.epochs << " epochs on " << instances.size() << " instances -> "
      << config.model_path() << " (final loss " << result.loss_log.back() << ")\n";
  manifest.add_output(config.model_path());
  manifest.add_output(config.loss_log_path());
  manifest.write(config.out_dir);
  return 0;
}

// Prediction records: {"instance_id", "probabilities": {label: p},
// "decisions": [labels]}, one JSON line per instance, in instance order.
inline int cmd_predict(const PipelineConfig& config, std::ostream& out) {
  detail::ensure_out_dir(config);
  RunManifest manifest("predict", config.to_json());

  detail::require_file(config.model_path(), "model");
  ModelParams params = ModelParams::load_file(config.model_path());
  manifest.add_input(config.model_path());

  LabelSet active;
  active.theory = parse_label_theory(config.label_theory);
  active.labels = params.config.labels;
  std::set<std::string> drop(config.drop_labels.begin(), config.drop_labels.end());
  auto instances = detail::load_instances_file(config.instances, active, drop);
  manifest.add_input(config.instances);

  detail::require_file(config.embeddings, "embedding");
  EmbeddingTable table = EmbeddingTable::load_file(config.embeddings);
  if (table.dim() != params.config.embedding_dim) {
    throw config_error("embedding dimension " + std::to_string(table.dim()) +
                       " does not match the model (" +
                       std::to_string(params.config.embedding_dim) + ")");
  }
  manifest.add_input(config.embeddings);

  auto ranked = detail::load_ranked_paths_file(config.ranked_paths_path());
  manifest.add_input(config.ranked_paths_path());
  auto aligned = align_paths(instances, ranked);

  const std::string out_path = config.predictions_path();
  {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw data_error("cannot write predictions: " + out_path);
    for (std::size_t i = 0; i < instances.size(); ++i) {
      PredictResult r = predict(params, instances[i], aligned[i], table);
      nlohmann::json probs = nlohmann::json::object();
      nlohmann::json decisions = nlohmann::json::array();
      for (std::size_t z = 0; z < params.config.labels.size(); ++z) {
        probs[params.config.labels[z]] = r.prediction.probabilities[z];
        if (r.prediction.decisions[z]) decisions.push_back(params.config.labels[z]);
      }
      f << nlohmann::json{{"instance_id", instances[i].instance_id},
                          {"probabilities", probs},
                          {"decisions", decisions}}
               .dump()
        << "\n";
    }
  }
  out << "predicted " << instances.size() << " instances -> " << out_path << "\n";
  manifest.add_output(out_path);
  manifest.write(config.out_dir);
  return 0;
}

// Compares the predictions file against gold instance labels and writes the
// metrics report (JSON + aligned table).
inline int cmd_eval(const PipelineConfig& config, std::ostream& out) {
  detail::ensure_out_dir(config);
  RunManifest manifest("eval", config.to_json());

  const LabelSet active = config.active_label_set();
  std::set<std::string> drop(config.drop_labels.begin(), config.drop_labels.end());
  auto instances = detail::load_instances_file(config.instances, active, drop);
  manifest.add_input(config.instances);

  detail::require_file(config.predictions_path(), "predictions");
  std::ifstream pf(config.predictions_path());
  manifest.add_input(config.predictions_path());
  std::vector<LabeledSets> preds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(pf, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw data_error("predictions line " + std::to_string(line_no) + ": " + e.what());
    }
    LabeledSets p;
    p.instance_id = j.at("instance_id").get<std::string>();
    for (const auto& d : j.at("decisions")) p.labels.insert(d.get<std::string>());
    preds.push_back(std::move(p));
  }

  std::vector<LabeledSets> golds;
  golds.reserve(instances.size());
  for (const auto& inst : instances) {
    golds.push_back(
        {inst.instance_id, {inst.gold_labels.begin(), inst.gold_labels.end()}});
  }

  MetricsReport report = micro_prf(preds, golds, active);
  {
    std::ofstream f(config.metrics_json_path(), std::ios::binary);
    if (!f) throw data_error("cannot write metrics: " + config.metrics_json_path());
    f << report.to_json().dump(2) << "\n";
  }
  {
    std::ofstream f(config.metrics_table_path(), std::ios::binary);
    if (!f) throw data_error("cannot write metrics table: " + config.metrics_table_path());
    f << report.to_table();
  }
  out << report.to_table();
  manifest.add_output(config.metrics_json_path());
  manifest.add_output(config.metrics_table_path());
  manifest.write(config.out_dir);
  return 0;
}

// Attention report for one instance: tokens and paths with their attention
// weights, printed in descending weight order; the JSON trace keeps input
// order (`path_weights` aligned to the ranked-path file).
inline int cmd_explain(const PipelineConfig& config, const std::string& instance_id,
                       std::ostream& out) {
  detail::ensure_out_dir(config);
  RunManifest manifest("explain", config.to_json());

  detail::require_file(config.model_path(), "model");
  ModelParams params = ModelParams::load_file(config.model_path());
  manifest.add_input(config.model_path());

  LabelSet active;
  active.theory = parse_label_theory(config.label_theory);
  active.labels = params.config.labels;
  std::set<std::string> drop(config.drop_labels.begin(), config.drop_labels.end());
  auto instances = detail::load_instances_file(config.instances, active, drop);
  manifest.add_input(config.instances);

  const Instance* target = nullptr;
  for (const auto& inst : instances) {
    if (inst.instance_id == instance_id) {
      target = &inst;
      break;
    }
  }
  if (!target) throw data_error("unknown instance id: " + instance_id);

  detail::require_file(config.embeddings, "embedding");
  EmbeddingTable table = EmbeddingTable::load_file(config.embeddings);
  manifest.add_input(config.embeddings);

  auto ranked = detail::load_ranked_paths_file(config.ranked_paths_path());
  manifest.add_input(config.ranked_paths_path());
  const RankedPathList* paths = nullptr;
  for (const auto& l : ranked) {
    if (l.instance_id == instance_id) {
      paths = &l;
      break;
    }
  }

  PredictResult r = predict(params, *target, paths, table);

  auto print_ranked = [&out](const std::vector<std::string>& names,
                             const std::vector<double>& weights) {
    std::vector<std::size_t> order(names.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
    for (std::size_t i : order) {
      std::ostringstream w;
      w.setf(std::ios::fixed);
      w.precision(6);
      w << weights[i];
      out << "  " << w.str() << "  " << names[i] << "\n";
    }
  };

  out << "instance " << instance_id << "\n";
  out << "sentence tokens by attention:\n";
  print_ranked(sentence_with_character(*target), r.trace.sentence_weights);
  if (!r.trace.context_weights.empty()) {
    out << "context tokens by attention:\n";
    print_ranked(target->context_tokens(), r.trace.context_weights);
  } else {
    out << "context: empty\n";
  }
  std::vector<KnowledgePath> used;
  if (paths) used = model_paths(*paths, params.config.k);
  if (!used.empty()) {
    std::vector<std::string> rendered;
    rendered.reserve(used.size());
    for (const auto& p : used) {
      const auto tokens = path_token_sequence(p);
      std::string s;
      for (const auto& t : tokens) {
        if (!s.empty()) s += ' ';
        s += t;
      }
      rendered.push_back(s);
    }
    out << "paths by attention:\n";
    print_ranked(rendered, r.trace.path_weights);
  } else {
    out << "paths: none (knowledge-free mode)\n";
  }
  out << "probabilities:\n";
  for (std::size_t z = 0; z < params.config.labels.size(); ++z) {
    out << "  " << params.config.labels[z] << " " << r.prediction.probabilities[z]
        << (r.prediction.decisions[z] ? " *" : "") << "\n";
  }

  nlohmann::json probs = nlohmann::json::object();
  for (std::size_t z = 0; z < params.config.labels.size(); ++z) {
    probs[params.config.labels[z]] = r.prediction.probabilities[z];
  }
  nlohmann::json trace{{"instance_id", instance_id},
                       {"token_weights",
                        {{"sentence", r.trace.sentence_weights},
                         {"context", r.trace.context_weights}}},
                       {"path_weights", r.trace.path_weights},
                       {"probabilities", probs}};
  const std::string trace_path = config.trace_path(instance_id);
  {
    std::ofstream f(trace_path, std::ios::binary);
    if (!f) throw data_error("cannot write trace: " + trace_path);
    f << trace.dump(2) << "\n";
  }
  manifest.add_output(trace_path);
  manifest.write(config.out_dir);
  return 0;
}

}  // namespace needpaths
