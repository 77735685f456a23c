// Per-instance subgraph induction: seeds (text concepts + need concepts),
// all shortest paths between text-text and text-need seed pairs, one-hop
// neighbor expansion, edge closure, and pruning of vertices unreachable from
// any seed. Traversal is undirected throughout; edge direction is retained
// for display only.
#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "needpaths/kg.hpp"

namespace needpaths {

struct SeedSet {
  std::vector<std::string> text_concepts;  // first-occurrence order, deduplicated
  std::vector<std::string> need_concepts;  // label-set order, deduplicated

  bool empty() const { return text_concepts.empty() && need_concepts.empty(); }
};

enum class Provenance { kSeedText, kSeedNeed, kShortestPath, kNeighbour };

inline const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kSeedText: return "seed-text";
    case Provenance::kSeedNeed: return "seed-need";
    case Provenance::kShortestPath: return "shortest-path";
    case Provenance::kNeighbour: return "neighbour";
  }
  return "?";
}

class SubGraph {
 public:
  SubGraph() = default;

  // Builds the finalized subgraph from a vertex set with provenance and the
  // parent edge closure over it.
  static SubGraph build(std::vector<std::pair<std::string, Provenance>> tagged_vertices,
                        std::vector<Edge> closure_edges) {
    SubGraph s;
    std::sort(tagged_vertices.begin(), tagged_vertices.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    s.vertices_.reserve(tagged_vertices.size());
    for (auto& [name, prov] : tagged_vertices) {
      s.index_.emplace(name, static_cast<std::uint32_t>(s.vertices_.size()));
      s.vertices_.push_back(name);
      s.provenance_.push_back(prov);
    }
    std::sort(closure_edges.begin(), closure_edges.end(), [](const Edge& a, const Edge& b) {
      return std::tie(a.head, a.relation, a.tail) < std::tie(b.head, b.relation, b.tail);
    });
    s.edges_ = std::move(closure_edges);
    s.adjacency_.assign(s.vertices_.size(), {});
    std::vector<std::set<std::uint32_t>> neigh(s.vertices_.size());
    for (const Edge& e : s.edges_) {
      auto h = s.index_.at(e.head), t = s.index_.at(e.tail);
      neigh[h].insert(t);
      neigh[t].insert(h);
    }
    for (std::size_t i = 0; i < neigh.size(); ++i) {
      s.adjacency_[i].assign(neigh[i].begin(), neigh[i].end());  // sorted ids = lex order
    }
    return s;
  }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool contains(const std::string& v) const { return index_.count(v) > 0; }
  std::uint32_t index_of(const std::string& v) const { return index_.at(v); }
  Provenance provenance(const std::string& v) const { return provenance_[index_.at(v)]; }

  // Distinct undirected neighbors (sorted vertex indices; index order = lex
  // order because vertices are stored sorted).
  const std::vector<std::uint32_t>& adjacent(std::uint32_t v) const { return adjacency_[v]; }
  std::size_t degree(std::uint32_t v) const { return adjacency_[v].size(); }

  nlohmann::json to_json() const {
    nlohmann::json verts = nlohmann::json::array();
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      verts.push_back({{"id", vertices_[i]}, {"provenance", provenance_name(provenance_[i])}});
    }
    nlohmann::json edges = nlohmann::json::array();
    for (const Edge& e : edges_) {
      edges.push_back(
          {{"head", e.head}, {"relation", e.relation}, {"tail", e.tail}, {"weight", e.weight}});
    }
    return {{"vertices", verts}, {"edges", edges}};
  }

 private:
  std::vector<std::string> vertices_;  // sorted lexicographically
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<Provenance> provenance_;
  std::vector<Edge> edges_;  // closure, sorted by (head, relation, tail)
  std::vector<std::vector<std::uint32_t>> adjacency_;
};

namespace detail {

// Undirected adjacency snapshot of the parent graph restricted to what BFS
// needs: distinct neighbor names per vertex, sorted for determinism.
inline std::vector<std::string> distinct_neighbors(const KnowledgeGraph& g,
                                                   const std::string& v) {
  std::set<std::string> out;
  for (const auto& n : g.neighbors(v)) out.insert(n.concept_id);
  return {out.begin(), out.end()};
}

// BFS distances from src, bounded by max_dist hops.
inline std::unordered_map<std::string, int> bfs_distances(const KnowledgeGraph& g,
                                                          const std::string& src, int max_dist) {
  std::unordered_map<std::string, int> dist{{src, 0}};
  std::deque<std::string> frontier{src};
  while (!frontier.empty()) {
    std::string v = frontier.front();
    frontier.pop_front();
    int d = dist[v];
    if (d >= max_dist) continue;
    for (const auto& n : distinct_neighbors(g, v)) {
      if (dist.emplace(n, d + 1).second) frontier.push_back(n);
    }
  }
  return dist;
}

// All shortest paths from src to dst, emitted in lexicographic vertex-sequence
// order, truncated to `limit`. Requires dst reachable within max_dist.
inline void shortest_paths_between(const KnowledgeGraph& g, const std::string& src,
                                   const std::string& dst, int max_dist, std::size_t limit,
                                   std::vector<std::vector<std::string>>& out) {
  auto dist_from_src = bfs_distances(g, src, max_dist);
  auto it = dist_from_src.find(dst);
  if (it == dist_from_src.end() || it->second > max_dist) return;
  int target_len = it->second;
  if (target_len == 0) return;  // src == dst contributes nothing
  // Reverse distances bound the forward search: a vertex v on some shortest
  // path satisfies d(src,v) + d(v,dst) = target_len.
  auto dist_from_dst = bfs_distances(g, dst, target_len);
  std::vector<std::string> path{src};
  // DFS in lexicographic neighbor order yields lexicographically sorted paths.
  std::function<void(const std::string&, int)> dfs = [&](const std::string& v, int d) {
    if (out.size() >= limit) return;
    if (v == dst) {
      out.push_back(path);
      return;
    }
    for (const auto& n : distinct_neighbors(g, v)) {
      if (out.size() >= limit) return;
      auto fit = dist_from_src.find(n);
      auto bit = dist_from_dst.find(n);
      if (fit == dist_from_src.end() || bit == dist_from_dst.end()) continue;
      if (fit->second != d + 1 || fit->second + bit->second != target_len) continue;
      path.push_back(n);
      dfs(n, d + 1);
      path.pop_back();
    }
  };
  dfs(src, 0);
}

}  // namespace detail

// All shortest undirected paths (length <= max_len, at most max_paths_per_pair
// per pair, lexicographic tie-break) between every unordered text-text pair
// and every text-need pair. Need-need pairs are excluded.
inline std::vector<std::vector<std::string>> collect_shortest_paths(const KnowledgeGraph& graph,
                                                                    const SeedSet& seeds,
                                                                    int max_len,
                                                                    int max_paths_per_pair) {
  std::vector<std::vector<std::string>> result;
  std::vector<std::string> text, need;
  for (const auto& c : seeds.text_concepts)
    if (graph.contains(c)) text.push_back(c);
  for (const auto& c : seeds.need_concepts)
    if (graph.contains(c)) need.push_back(c);

  std::set<std::pair<std::string, std::string>> pairs;  // ordered -> deterministic
  for (std::size_t i = 0; i < text.size(); ++i) {
    for (std::size_t j = i + 1; j < text.size(); ++j) {
      auto [a, b] = std::minmax(text[i], text[j]);
      if (a != b) pairs.emplace(a, b);
    }
    for (const auto& z : need) {
      auto [a, b] = std::minmax(text[i], z);
      if (a != b) pairs.emplace(a, b);
    }
  }
  for (const auto& [a, b] : pairs) {
    detail::shortest_paths_between(graph, a, b, max_len,
                                   static_cast<std::size_t>(max_paths_per_pair), result);
  }
  return result;
}

// core union one-hop neighbors of core; per-vertex neighbor cap keeps the
// highest-weight neighbors (max incident edge weight per neighbor), ties
// broken lexicographically. cap <= 0 means unlimited.
inline std::set<std::string> expand_neighbors(const KnowledgeGraph& graph,
                                              const std::set<std::string>& core,
                                              int cap = 0) {
  std::set<std::string> result(core.begin(), core.end());
  for (const auto& v : core) {
    if (!graph.contains(v)) continue;
    std::map<std::string, double> best_weight;  // neighbor -> max edge weight
    for (std::uint32_t ei : graph.incident_edges(v)) {
      const Edge& e = graph.edges()[ei];
      const std::string& other = e.head == v ? e.tail : e.head;
      auto [it, inserted] = best_weight.emplace(other, e.weight);
      if (!inserted) it->second = std::max(it->second, e.weight);
    }
    if (cap <= 0 || best_weight.size() <= static_cast<std::size_t>(cap)) {
      for (const auto& [n, w] : best_weight) result.insert(n);
    } else {
      std::vector<std::pair<std::string, double>> ranked(best_weight.begin(), best_weight.end());
      std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
      });
      for (int i = 0; i < cap; ++i) result.insert(ranked[static_cast<std::size_t>(i)].first);
    }
  }
  return result;
}

// Full induction: seeds + shortest-path vertices + neighbor expansion, edge
// closure, and pruning of vertices with no undirected connection to a seed.
inline SubGraph induce(const KnowledgeGraph& graph, const SeedSet& seeds, int max_len = 4,
                       int max_paths_per_pair = 10, int neighbor_cap = 0) {
  if (seeds.empty()) throw data_error("subgraph induction requires at least one seed concept");

  // Provenance: seed-text > seed-need > shortest-path > neighbour.
  std::map<std::string, Provenance> tag;
  for (const auto& c : seeds.text_concepts)
    if (graph.contains(c)) tag.emplace(c, Provenance::kSeedText);
  for (const auto& c : seeds.need_concepts)
    if (graph.contains(c)) tag.emplace(c, Provenance::kSeedNeed);
  if (tag.empty()) throw data_error("no seed concept exists in the graph");

  for (const auto& path : collect_shortest_paths(graph, seeds, max_len, max_paths_per_pair)) {
    for (const auto& v : path) tag.emplace(v, Provenance::kShortestPath);
  }

  std::set<std::string> core;
  for (const auto& [v, p] : tag) core.insert(v);
  for (const auto& v : expand_neighbors(graph, core, neighbor_cap)) {
    tag.emplace(v, Provenance::kNeighbour);
  }

  // Edge closure over the tagged vertex set.
  std::vector<Edge> closure;
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (const auto& [v, p] : tag) {
    for (std::uint32_t ei : graph.incident_edges(v)) {
      const Edge& e = graph.edges()[ei];
      if (tag.count(e.head) == 0 || tag.count(e.tail) == 0) continue;
      if (seen.emplace(e.head, e.relation, e.tail).second) closure.push_back(e);
    }
  }

  // Prune vertices unreachable (undirected) from any seed.
  std::map<std::string, std::set<std::string>> undirected;
  for (const Edge& e : closure) {
    undirected[e.head].insert(e.tail);
    undirected[e.tail].insert(e.head);
  }
  std::set<std::string> reachable;
  std::deque<std::string> frontier;
  for (const auto& [v, p] : tag) {
    if (p == Provenance::kSeedText || p == Provenance::kSeedNeed) {
      reachable.insert(v);
      frontier.push_back(v);
    }
  }
  while (!frontier.empty()) {
    std::string v = frontier.front();
    frontier.pop_front();
    auto it = undirected.find(v);
    if (it == undirected.end()) continue;
    for (const auto& n : it->second) {
      if (reachable.insert(n).second) frontier.push_back(n);
    }
  }

  std::vector<std::pair<std::string, Provenance>> kept;
  for (const auto& [v, p] : tag)
    if (reachable.count(v) > 0) kept.emplace_back(v, p);
  std::vector<Edge> kept_edges;
  for (const Edge& e : closure)
    if (reachable.count(e.head) > 0 && reachable.count(e.tail) > 0) kept_edges.push_back(e);

  return SubGraph::build(std::move(kept), std::move(kept_edges));
}

}  // namespace needpaths
