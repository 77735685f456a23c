// Simple-path enumeration over an induced subgraph and path scoring as the
// mean of vertex scores. Paths connect a text concept to a need concept
// (type c-z) or two distinct text concepts (type c-c). Each hop carries a
// representative edge: among parent edges between the two vertices, the one
// with the highest weight, ties broken by relation name, forward direction
// preferred.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "needpaths/common.hpp"
#include "needpaths/scoring.hpp"
#include "needpaths/subgraph.hpp"

namespace needpaths {

enum class PathType { kConceptNeed, kConceptConcept };

inline const char* path_type_name(PathType t) {
  return t == PathType::kConceptNeed ? "c-z" : "c-c";
}

struct PathHop {
  std::string relation;
  bool forward = true;  // true: edge points from concepts[i] to concepts[i+1]
};

struct KnowledgePath {
  PathType type = PathType::kConceptNeed;
  std::string endpoint;               // need concept (c-z) or "a--b" canonical pair (c-c)
  std::vector<std::string> concepts;  // vertex sequence, length hops + 1
  std::vector<PathHop> hops;          // length = concepts.size() - 1
  double pscore_cc = 0.0;
  double pscore_pr = 0.0;
  double pscore_ppr = 0.0;
  double pscore_combined = 0.0;

  // Relation strings with a direction mark: "+IsA" along edge direction,
  // "-IsA" against it.
  std::vector<std::string> marked_relations() const {
    std::vector<std::string> out;
    out.reserve(hops.size());
    for (const auto& h : hops) out.push_back((h.forward ? "+" : "-") + h.relation);
    return out;
  }
};

inline std::string concept_pair_key(const std::string& a, const std::string& b) {
  return a < b ? a + "--" + b : b + "--" + a;
}

namespace detail {

// For every ordered vertex pair (u, v) with at least one connecting edge,
// the representative hop: highest weight first, then lexicographically
// smaller relation, then forward orientation.
class HopTable {
 public:
  explicit HopTable(const SubGraph& sub) {
    for (const Edge& e : sub.edges()) {
      consider(e.head, e.tail, {e.relation, true}, e.weight);
      consider(e.tail, e.head, {e.relation, false}, e.weight);
    }
  }

  const PathHop& lookup(const std::string& u, const std::string& v) const {
    auto it = best_.find(std::make_pair(u, v));
    if (it == best_.end()) {
      throw data_error("no edge between adjacent path vertices " + u + " and " + v);
    }
    return it->second.first;
  }

 private:
  void consider(const std::string& u, const std::string& v, PathHop hop, double weight) {
    auto key = std::make_pair(u, v);
    auto it = best_.find(key);
    if (it == best_.end()) {
      best_.emplace(key, std::make_pair(std::move(hop), weight));
      return;
    }
    auto& [cur, cur_weight] = it->second;
    bool better = false;
    if (weight != cur_weight) {
      better = weight > cur_weight;
    } else if (hop.relation != cur.relation) {
      better = hop.relation < cur.relation;
    } else {
      better = hop.forward && !cur.forward;
    }
    if (better) it->second = std::make_pair(std::move(hop), weight);
  }

  std::map<std::pair<std::string, std::string>, std::pair<PathHop, double>> best_;
};

}  // namespace detail

// Enumerates simple paths (no repeated vertex) of 1..max_hops hops from every
// text concept, in lexicographic neighbor order. A path is recorded when its
// last vertex is a need concept (type c-z, grouped by that need) or a
// lexicographically larger text concept (type c-c, grouped by the canonical
// pair); enumeration continues through recorded vertices. Each endpoint group
// keeps at most enumeration_cap paths, in discovery order.
inline std::vector<KnowledgePath> enumerate_paths(const SubGraph& sub, const SeedSet& seeds,
                                                  int max_hops = 4,
                                                  std::size_t enumeration_cap = 1000) {
  std::set<std::string> text_set, need_set;
  for (const auto& c : seeds.text_concepts) {
    if (sub.contains(c)) text_set.insert(c);
  }
  for (const auto& c : seeds.need_concepts) {
    if (sub.contains(c)) need_set.insert(c);
  }
  std::vector<std::string> roots(text_set.begin(), text_set.end());  // sorted

  detail::HopTable hops(sub);
  std::vector<KnowledgePath> result;
  std::map<std::string, std::size_t> group_size;  // "type|endpoint" -> count

  auto record = [&](PathType type, const std::string& endpoint,
                    const std::vector<std::uint32_t>& stack) {
    std::string key = std::string(path_type_name(type)) + "|" + endpoint;
    auto& count = group_size[key];
    if (count >= enumeration_cap) return;
    KnowledgePath p;
    p.type = type;
    p.endpoint = endpoint;
    p.concepts.reserve(stack.size());
    for (std::uint32_t id : stack) p.concepts.push_back(sub.vertices()[id]);
    for (std::size_t i = 0; i + 1 < p.concepts.size(); ++i) {
      p.hops.push_back(hops.lookup(p.concepts[i], p.concepts[i + 1]));
    }
    result.push_back(std::move(p));
    ++count;
  };

  for (const auto& root : roots) {
    std::vector<std::uint32_t> stack{sub.index_of(root)};
    std::set<std::uint32_t> on_path{sub.index_of(root)};

    std::function<void()> dfs = [&]() {
      std::uint32_t v = stack.back();
      if (static_cast<int>(stack.size()) - 1 >= max_hops) return;
      for (std::uint32_t w : sub.adjacent(v)) {
        if (on_path.count(w) > 0) continue;
        stack.push_back(w);
        on_path.insert(w);
        const std::string& name = sub.vertices()[w];
        if (need_set.count(name) > 0 && name != root) {
          record(PathType::kConceptNeed, name, stack);
        }
        // c-c paths are recorded only from the lexicographically smaller
        // root so each undirected path appears once.
        if (text_set.count(name) > 0 && root < name) {
          record(PathType::kConceptConcept, concept_pair_key(root, name), stack);
        }
        dfs();
        on_path.erase(w);
        stack.pop_back();
      }
    };
    dfs();
  }
  return result;
}

// Path score: arithmetic mean of the vertex scores of every concept on the
// path. scores must align with sub.vertices().
inline double pscore(const KnowledgePath& path, const SubGraph& sub, const VertexScores& scores) {
  if (path.concepts.empty()) throw data_error("cannot score an empty path");
  double total = 0.0;
  for (const auto& c : path.concepts) {
    if (!sub.contains(c)) throw data_error("path vertex not in subgraph: " + c);
    total += scores[sub.index_of(c)];
  }
  return total / static_cast<double>(path.concepts.size());
}

}  // namespace needpaths
