// Path ranking and selection. Candidate paths are grouped by endpoint (the
// need concept for c-z paths, the canonical concept pair for c-c paths);
// within each group a strategy orders the paths and the top k are kept.
// Strategies: none (keep everything in discovery order), random (uniform
// sample), and path scores derived from closeness centrality, PageRank,
// personalized PageRank, or the normalized mean of closeness and
// personalized PageRank.
#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "needpaths/common.hpp"
#include "needpaths/paths.hpp"
#include "needpaths/scoring.hpp"
#include "needpaths/subgraph.hpp"

namespace needpaths {

enum class Strategy { kNone, kRandom, kCc, kPr, kPpr, kCcPpr };

inline const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kNone: return "none";
    case Strategy::kRandom: return "random";
    case Strategy::kCc: return "cc";
    case Strategy::kPr: return "pr";
    case Strategy::kPpr: return "ppr";
    case Strategy::kCcPpr: return "cc+ppr";
  }
  return "?";
}

inline Strategy parse_strategy(const std::string& name) {
  if (name == "none") return Strategy::kNone;
  if (name == "random") return Strategy::kRandom;
  if (name == "cc") return Strategy::kCc;
  if (name == "pr") return Strategy::kPr;
  if (name == "ppr") return Strategy::kPpr;
  if (name == "cc+ppr") return Strategy::kCcPpr;
  throw config_error("unknown ranking strategy: " + name +
                     " (expected none, random, cc, pr, ppr, or cc+ppr)");
}

struct RankingConfig {
  Strategy strategy = Strategy::kCcPpr;
  double alpha = 0.85;       // damping for PageRank / personalized PageRank
  int k = 3;                 // paths kept per endpoint group
  int max_hops = 4;          // path enumeration depth
  int enumeration_cap = 1000;  // candidate paths kept per endpoint group
  std::uint64_t seed = 0;    // drives the random strategy
};

// One endpoint group of ranked paths.
struct RankedGroup {
  PathType type = PathType::kConceptNeed;
  std::string endpoint;
  std::vector<KnowledgePath> paths;
};

struct RankedPathList {
  std::string instance_id;
  std::vector<RankedGroup> groups;  // c-z groups first (by endpoint), then c-c
};

namespace detail {

// Min-max normalization over a group; a constant vector maps to all 0.5.
inline std::vector<double> min_max_normalize(const std::vector<double>& v) {
  if (v.empty()) return {};
  double lo = *std::min_element(v.begin(), v.end());
  double hi = *std::max_element(v.begin(), v.end());
  std::vector<double> out(v.size());
  if (hi == lo) {
    std::fill(out.begin(), out.end(), 0.5);
  } else {
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - lo) / (hi - lo);
  }
  return out;
}

}  // namespace detail

// Scores every candidate path under all scoring families, groups by endpoint,
// orders each group by the configured strategy, and keeps the top k. Ordering
// ties break toward shorter paths, then the lexicographically smaller concept
// sequence. The topic set for personalized PageRank is the seed concepts
// present in the subgraph.
inline RankedPathList rank_and_select(const std::string& instance_id,
                                      std::vector<KnowledgePath> candidates, const SubGraph& sub,
                                      const SeedSet& seeds, const RankingConfig& config) {
  RankedPathList out;
  out.instance_id = instance_id;
  if (candidates.empty()) return out;

  VertexScores cc = vscore_cc(sub);
  VertexScores pr = vscore_pr(sub, config.alpha);
  std::vector<std::string> topic;
  for (const auto& c : seeds.text_concepts)
    if (sub.contains(c)) topic.push_back(c);
  for (const auto& c : seeds.need_concepts)
    if (sub.contains(c) && std::find(topic.begin(), topic.end(), c) == topic.end())
      topic.push_back(c);
  VertexScores ppr = topic.empty() ? VertexScores(sub.vertex_count(), 0.0)
                                   : vscore_ppr(sub, topic, config.alpha);

  for (auto& p : candidates) {
    p.pscore_cc = pscore(p, sub, cc);
    p.pscore_pr = pscore(p, sub, pr);
    p.pscore_ppr = pscore(p, sub, ppr);
  }

  // Group by (type, endpoint); map order gives c-c/c-z determinism, final
  // ordering below puts c-z groups first.
  std::map<std::pair<int, std::string>, std::vector<KnowledgePath>> groups;
  for (auto& p : candidates) {
    groups[{p.type == PathType::kConceptNeed ? 0 : 1, p.endpoint}].push_back(std::move(p));
  }

  for (auto& [key, paths] : groups) {
    // Combined score is normalized within the group.
    std::vector<double> cc_scores, ppr_scores;
    cc_scores.reserve(paths.size());
    ppr_scores.reserve(paths.size());
    for (const auto& p : paths) {
      cc_scores.push_back(p.pscore_cc);
      ppr_scores.push_back(p.pscore_ppr);
    }
    auto ncc = detail::min_max_normalize(cc_scores);
    auto nppr = detail::min_max_normalize(ppr_scores);
    for (std::size_t i = 0; i < paths.size(); ++i) {
      paths[i].pscore_combined = 0.5 * (ncc[i] + nppr[i]);
    }

    const std::size_t keep = std::min<std::size_t>(paths.size(), static_cast<std::size_t>(
                                                                     std::max(config.k, 0)));
    switch (config.strategy) {
      case Strategy::kNone:
        break;  // keep everything in discovery order
      case Strategy::kRandom: {
        std::mt19937_64 rng(config.seed);
        fisher_yates(paths, rng);
        paths.resize(keep);
        break;
      }
      default: {
        auto score_of = [&](const KnowledgePath& p) {
          switch (config.strategy) {
            case Strategy::kCc: return p.pscore_cc;
            case Strategy::kPr: return p.pscore_pr;
            case Strategy::kPpr: return p.pscore_ppr;
            default: return p.pscore_combined;
          }
        };
        std::stable_sort(paths.begin(), paths.end(),
                         [&](const KnowledgePath& a, const KnowledgePath& b) {
                           double sa = score_of(a), sb = score_of(b);
                           if (sa != sb) return sa > sb;
                           if (a.concepts.size() != b.concepts.size())
                             return a.concepts.size() < b.concepts.size();
                           return a.concepts < b.concepts;
                         });
        paths.resize(keep);
        break;
      }
    }
    if (paths.empty()) continue;
    RankedGroup g;
    g.type = paths.front().type;
    g.endpoint = key.second;
    g.paths = std::move(paths);
    out.groups.push_back(std::move(g));
  }
  return out;
}

// --- serialization -----------------------------------------------------------

inline nlohmann::json group_to_json(const std::string& instance_id, const RankedGroup& g) {
  nlohmann::json paths = nlohmann::json::array();
  for (const auto& p : g.paths) {
    paths.push_back({{"concepts", p.concepts},
                     {"relations", p.marked_relations()},
                     {"pscore_cc", p.pscore_cc},
                     {"pscore_pr", p.pscore_pr},
                     {"pscore_ppr", p.pscore_ppr},
                     {"pscore_combined", p.pscore_combined}});
  }
  return {{"instance_id", instance_id},
          {"path_type", path_type_name(g.type)},
          {"endpoint", g.endpoint},
          {"paths", paths}};
}

// One JSONL line per endpoint group, in list order.
inline std::string ranked_paths_to_jsonl(const RankedPathList& list) {
  std::string out;
  for (const auto& g : list.groups) {
    out += group_to_json(list.instance_id, g).dump();
    out += '\n';
  }
  return out;
}

inline RankedGroup group_from_json(const nlohmann::json& j, std::string* instance_id) {
  RankedGroup g;
  if (instance_id) *instance_id = j.at("instance_id").get<std::string>();
  std::string type = j.at("path_type").get<std::string>();
  if (type == "c-z") {
    g.type = PathType::kConceptNeed;
  } else if (type == "c-c") {
    g.type = PathType::kConceptConcept;
  } else {
    throw data_error("unknown path_type in ranked path record: " + type);
  }
  g.endpoint = j.at("endpoint").get<std::string>();
  for (const auto& pj : j.at("paths")) {
    KnowledgePath p;
    p.type = g.type;
    p.endpoint = g.endpoint;
    p.concepts = pj.at("concepts").get<std::vector<std::string>>();
    for (const auto& r : pj.at("relations").get<std::vector<std::string>>()) {
      if (r.empty() || (r[0] != '+' && r[0] != '-')) {
        throw data_error("relation missing direction mark in ranked path record: " + r);
      }
      p.hops.push_back({r.substr(1), r[0] == '+'});
    }
    if (p.concepts.size() != p.hops.size() + 1) {
      throw data_error("ranked path record has mismatched concepts/relations lengths");
    }
    p.pscore_cc = pj.at("pscore_cc").get<double>();
    p.pscore_pr = pj.at("pscore_pr").get<double>();
    p.pscore_ppr = pj.at("pscore_ppr").get<double>();
    p.pscore_combined = pj.at("pscore_combined").get<double>();
    g.paths.push_back(std::move(p));
  }
  return g;
}

// Parses a whole ranked-paths JSONL stream into per-instance lists, in file
// order (groups of the same instance must be contiguous).
inline std::vector<RankedPathList> ranked_paths_from_jsonl(std::istream& in) {
  std::vector<RankedPathList> lists;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw data_error("ranked paths line " + std::to_string(line_no) + ": " + e.what());
    }
    std::string instance_id;
    RankedGroup g = group_from_json(j, &instance_id);
    if (lists.empty() || lists.back().instance_id != instance_id) {
      lists.push_back({instance_id, {}});
    }
    lists.back().groups.push_back(std::move(g));
  }
  return lists;
}

}  // namespace needpaths
