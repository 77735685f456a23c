// Shared test fixtures: temp directories, a small story corpus with a
// hand-countable graph, and a synthetic task whose labels are recoverable
// from one planted knowledge path per instance.
#pragma once

#include <unistd.h>

#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "needpaths/embeddings.hpp"
#include "needpaths/kg.hpp"
#include "needpaths/linking.hpp"
#include "needpaths/ranking.hpp"
#include "needpaths/text.hpp"

namespace fixtures {

// Unique temp directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("needpaths-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// One embedding line: word then its vector, full double precision.
inline std::string embedding_line(const std::string& word, const std::vector<double>& vec) {
  std::ostringstream out;
  out.precision(17);
  out << word;
  for (double v : vec) out << ' ' << v;
  out << '\n';
  return out.str();
}

// Random direction scaled to the requested norm.
inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t dim, double norm) {
  std::vector<double> v(dim);
  double total = 0.0;
  do {
    total = 0.0;
    for (auto& x : v) {
      x = needpaths::uniform_range(rng, -1.0, 1.0);
      total += x * x;
    }
  } while (total == 0.0);
  const double scale = norm / std::sqrt(total);
  for (auto& x : v) x *= scale;
  return v;
}

// ---------------------------------------------------------------------------
// Story corpus: 21-vertex / 17-edge graph, 20 instances whose gold set is all
// five need categories, and matching embeddings. Hand counts used by tests:
// vertices 21, edges 17.

struct ToyCorpus {
  std::string graph_csv;
  std::string instances_jsonl;
  std::string embeddings_txt;
  needpaths::LabelSet labels;
  std::vector<needpaths::Instance> instances;
};

inline const std::vector<std::array<std::string, 4>>& toy_edges() {
  static const std::vector<std::array<std::string, 4>> rows{
      {"IsA", "exhausting", "fatigue", "1.0"},
      {"CausesDesire", "fatigue", "rest", "2.0"},
      {"RelatedTo", "rest", "physiological", "1.5"},
      {"Causes", "marathon", "fatigue", "1.0"},
      {"IsA", "gold_medal", "medal", "2.0"},
      {"RelatedTo", "medal", "win", "1.0"},
      {"Causes", "win", "pride", "1.0"},
      {"RelatedTo", "pride", "esteem", "2.0"},
      {"MotivatedByGoal", "run", "win", "1.0"},
      {"RelatedTo", "hunger", "food", "2.0"},
      {"RelatedTo", "food", "physiological", "2.0"},
      {"RelatedTo", "hug", "love", "2.0"},
      {"RelatedTo", "family", "love", "1.5"},
      {"RelatedTo", "prayer", "spiritual", "2.0"},
      {"RelatedTo", "savings", "stability", "1.5"},
      {"RelatedTo", "home", "stability", "1.0"},
      {"RelatedTo", "marathon", "run", "1.0"},
  };
  return rows;
}

constexpr std::size_t kToyVertexCount = 21;
constexpr std::size_t kToyEdgeCount = 17;

inline const std::vector<std::vector<std::string>>& toy_sentences() {
  static const std::vector<std::vector<std::string>> pool{
      {"the", "marathon", "was", "exhausting"},
      {"she", "wanted", "to", "win", "a", "gold", "medal"},
      {"he", "felt", "hunger", "after", "the", "run"},
      {"the", "family", "shared", "a", "hug"},
      {"prayer", "brought", "rest", "to", "the", "home"},
  };
  return pool;
}

inline ToyCorpus make_toy_corpus(const TempDir& dir, std::size_t n_instances = 20,
                                 std::size_t embedding_dim = 8) {
  ToyCorpus corpus;
  corpus.labels = needpaths::LabelSet::make(needpaths::LabelTheory::kMaslow);

  // Graph file (CSV with header).
  std::ostringstream graph;
  graph << "relation,head,tail,weight\n";
  for (const auto& row : toy_edges()) {
    graph << row[0] << ',' << row[1] << ',' << row[2] << ',' << row[3] << '\n';
  }
  corpus.graph_csv = dir.file("graph.csv");
  write_file(corpus.graph_csv, graph.str());

  // Instances: every gold set is the full label inventory, so a model that
  // answers all-positive is exactly right.
  const auto& pool = toy_sentences();
  const std::vector<std::string> characters{"Sam", "Alex", ""};
  std::ostringstream lines;
  for (std::size_t i = 0; i < n_instances; ++i) {
    needpaths::Instance inst;
    std::ostringstream id;
    id << 'i' << (i + 1 < 10 ? "0" : "") << (i + 1);
    inst.instance_id = id.str();
    inst.story_id = "st" + std::to_string(i / 5 + 1);
    inst.line_no = static_cast<int>(i % 5) + 1;
    inst.sentence_tokens = pool[i % pool.size()];
    if (i % 4 == 3) {
      inst.context_sentences = {pool[(i + 1) % pool.size()]};
    } else if (i % 4 == 2) {
      inst.context_sentences = {pool[(i + 2) % pool.size()], pool[(i + 3) % pool.size()]};
    }
    inst.character = characters[i % characters.size()];
    inst.gold_labels = corpus.labels.labels;
    std::sort(inst.gold_labels.begin(), inst.gold_labels.end());
    corpus.instances.push_back(inst);
    lines << inst.to_json().dump() << '\n';
  }
  corpus.instances_jsonl = dir.file("instances.jsonl");
  write_file(corpus.instances_jsonl, lines.str());

  // Embeddings for every word any encoder can see: sentence tokens, character
  // names, concept words, relation words.
  std::set<std::string> vocab;
  for (const auto& sent : pool) vocab.insert(sent.begin(), sent.end());
  vocab.insert("Sam");
  vocab.insert("Alex");
  for (const auto& row : toy_edges()) {
    for (const auto& w : needpaths::split_camel(row[0])) vocab.insert(w);
    for (const auto& w : needpaths::split_underscore(row[1])) vocab.insert(w);
    for (const auto& w : needpaths::split_underscore(row[2])) vocab.insert(w);
  }
  std::mt19937_64 rng(7);
  std::ostringstream emb;
  for (const auto& word : vocab) {
    emb << embedding_line(word, random_vector(rng, embedding_dim, 1.0));
  }
  corpus.embeddings_txt = dir.file("embeddings.txt");
  write_file(corpus.embeddings_txt, emb.str());
  return corpus;
}

// ---------------------------------------------------------------------------
// Planted-path task. Sentences are near-silent (tiny-norm filler tokens);
// each instance's single gold label is spelled out by one injected knowledge
// path [cue_<label>, CausesDesire, <label>] whose words carry most of the
// input magnitude. A model trained with the paths can read the label off its
// only high-magnitude channel; the same model without paths cannot.

struct PlantedTask {
  needpaths::LabelSet labels;
  std::vector<needpaths::Instance> train_set, test_set;
  std::vector<needpaths::RankedPathList> train_paths, test_paths;
  std::string embeddings_txt;  // written into the given directory
};

inline needpaths::RankedPathList planted_path_list(const std::string& instance_id,
                                                   const std::string& label) {
  needpaths::KnowledgePath path;
  path.type = needpaths::PathType::kConceptNeed;
  path.endpoint = label;
  path.concepts = {"cue" + label, label};
  path.hops = {{"CausesDesire", true}};
  path.pscore_cc = path.pscore_pr = path.pscore_ppr = path.pscore_combined = 1.0;

  needpaths::RankedGroup group;
  group.type = needpaths::PathType::kConceptNeed;
  group.endpoint = label;
  group.paths = {path};

  needpaths::RankedPathList list;
  list.instance_id = instance_id;
  list.groups = {group};
  return list;
}

inline PlantedTask make_planted_task(const TempDir& dir, std::size_t n_train = 500,
                                     std::size_t n_test = 200, std::size_t embedding_dim = 24,
                                     std::uint64_t seed = 20240915) {
  PlantedTask task;
  task.labels = needpaths::LabelSet::make(needpaths::LabelTheory::kMaslow);
  std::mt19937_64 rng(seed);

  constexpr std::size_t kFillerVocab = 40;
  constexpr std::size_t kSentenceLen = 8;
  constexpr double kFillerNorm = 1e-3;
  constexpr double kConceptNorm = 2.0;
  constexpr double kRelationNorm = 0.1;

  std::ostringstream emb;
  std::vector<std::string> fillers;
  for (std::size_t i = 0; i < kFillerVocab; ++i) {
    std::ostringstream w;
    w << "filler" << (i < 10 ? "0" : "") << i;
    fillers.push_back(w.str());
    emb << embedding_line(fillers.back(), random_vector(rng, embedding_dim, kFillerNorm));
  }
  for (const auto& label : task.labels.labels) {
    emb << embedding_line("cue" + label, random_vector(rng, embedding_dim, kConceptNorm));
    emb << embedding_line(label, random_vector(rng, embedding_dim, kConceptNorm));
  }
  emb << embedding_line("causes", random_vector(rng, embedding_dim, kRelationNorm));
  emb << embedding_line("desire", random_vector(rng, embedding_dim, kRelationNorm));
  task.embeddings_txt = dir.file("planted_embeddings.txt");
  write_file(task.embeddings_txt, emb.str());

  auto make_split = [&](const std::string& prefix, std::size_t count,
                        std::vector<needpaths::Instance>& instances,
                        std::vector<needpaths::RankedPathList>& paths) {
    for (std::size_t i = 0; i < count; ++i) {
      const std::string& label = task.labels.labels[i % task.labels.labels.size()];
      needpaths::Instance inst;
      std::ostringstream id;
      id << prefix;
      id.width(4);
      id.fill('0');
      id << i;
      inst.instance_id = id.str();
      inst.story_id = prefix;
      inst.line_no = 1;
      for (std::size_t t = 0; t < kSentenceLen; ++t) {
        inst.sentence_tokens.push_back(fillers[needpaths::uniform_index(rng, fillers.size())]);
      }
      inst.character = "";
      inst.gold_labels = {label};
      instances.push_back(inst);
      paths.push_back(planted_path_list(inst.instance_id, label));
    }
  };
  make_split("tr", n_train, task.train_set, task.train_paths);
  make_split("te", n_test, task.test_set, task.test_paths);
  return task;
}

inline std::string ranked_paths_file(const TempDir& dir, const std::string& name,
                                     const std::vector<needpaths::RankedPathList>& lists) {
  std::string content;
  for (const auto& l : lists) content += needpaths::ranked_paths_to_jsonl(l);
  std::string path = dir.file(name);
  write_file(path, content);
  return path;
}

inline std::string instances_file(const TempDir& dir, const std::string& name,
                                  const std::vector<needpaths::Instance>& instances) {
  std::ostringstream out;
  for (const auto& inst : instances) out << inst.to_json().dump() << '\n';
  std::string path = dir.file(name);
  write_file(path, out.str());
  return path;
}

}  // namespace fixtures
