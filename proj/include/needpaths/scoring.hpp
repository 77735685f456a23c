// Vertex scoring over an induced subgraph: closeness centrality computed per
// connected component, PageRank, and personalized PageRank with a topic set.
// All traversal is undirected over distinct-neighbor adjacency.
#pragma once

#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "needpaths/common.hpp"
#include "needpaths/subgraph.hpp"

namespace needpaths {

// Vertex scores aligned with SubGraph::vertices() order.
using VertexScores = std::vector<double>;

namespace scoring {
constexpr int kMaxIterations = 100;
constexpr double kTolerance = 1e-10;
}  // namespace scoring

// Closeness centrality within each connected component: score(v) = |C| / sum
// of hop distances from v to every vertex of its component C. Singleton
// vertices score 0.
inline VertexScores vscore_cc(const SubGraph& sub) {
  const std::size_t n = sub.vertex_count();
  VertexScores score(n, 0.0);
  std::vector<int> component(n, -1);
  int comp_count = 0;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (component[v] != -1) continue;
    std::deque<std::uint32_t> frontier{v};
    component[v] = comp_count;
    std::vector<std::uint32_t> members{v};
    while (!frontier.empty()) {
      std::uint32_t u = frontier.front();
      frontier.pop_front();
      for (std::uint32_t w : sub.adjacent(u)) {
        if (component[w] == -1) {
          component[w] = comp_count;
          members.push_back(w);
          frontier.push_back(w);
        }
      }
    }
    ++comp_count;
    if (members.size() < 2) continue;  // singleton component scores 0
    const double size = static_cast<double>(members.size());
    for (std::uint32_t src : members) {
      // BFS distances within the component.
      std::map<std::uint32_t, int> dist{{src, 0}};
      std::deque<std::uint32_t> q{src};
      double total = 0.0;
      while (!q.empty()) {
        std::uint32_t u = q.front();
        q.pop_front();
        int d = dist[u];
        total += d;
        for (std::uint32_t w : sub.adjacent(u)) {
          if (dist.emplace(w, d + 1).second) q.push_back(w);
        }
      }
      score[src] = size / total;
    }
  }
  return score;
}

namespace detail {

// Power iteration shared by PageRank and personalized PageRank. teleport[i]
// already includes the (1 - alpha) factor. Mass lost at vertices without
// neighbors is handled by renormalizing to sum 1 each iteration.
inline VertexScores power_iteration(const SubGraph& sub, double alpha,
                                    const std::vector<double>& teleport, int max_iterations,
                                    double tolerance) {
  const std::size_t n = sub.vertex_count();
  VertexScores x(n, n > 0 ? 1.0 / static_cast<double>(n) : 0.0);
  VertexScores next(n, 0.0);
  for (int iter = 0; iter < max_iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) next[i] = teleport[i];
    for (std::uint32_t j = 0; j < n; ++j) {
      const auto& adj = sub.adjacent(j);
      if (adj.empty()) continue;
      const double share = alpha * x[j] / static_cast<double>(adj.size());
      for (std::uint32_t i : adj) next[i] += share;
    }
    double sum = 0.0;
    for (double v : next) sum += v;
    if (sum > 0.0) {
      for (double& v : next) v /= sum;
    }
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) delta += std::fabs(next[i] - x[i]);
    x.swap(next);
    if (delta < tolerance) break;
  }
  return x;
}

}  // namespace detail

// PageRank with uniform teleport.
inline VertexScores vscore_pr(const SubGraph& sub, double alpha = 0.85,
                              int max_iterations = scoring::kMaxIterations,
                              double tolerance = scoring::kTolerance) {
  const std::size_t n = sub.vertex_count();
  if (n == 0) return {};
  std::vector<double> teleport(n, (1.0 - alpha) / static_cast<double>(n));
  return detail::power_iteration(sub, alpha, teleport, max_iterations, tolerance);
}

// Personalized PageRank: teleport mass is split uniformly over the topic set.
// Every topic vertex must exist in the subgraph.
inline VertexScores vscore_ppr(const SubGraph& sub, const std::vector<std::string>& topic,
                               double alpha = 0.85,
                               int max_iterations = scoring::kMaxIterations,
                               double tolerance = scoring::kTolerance) {
  const std::size_t n = sub.vertex_count();
  if (n == 0) return {};
  if (topic.empty()) throw data_error("personalized PageRank requires a non-empty topic set");
  std::vector<double> teleport(n, 0.0);
  std::set<std::uint32_t> topic_ids;
  for (const auto& t : topic) {
    if (!sub.contains(t)) throw data_error("topic vertex not in subgraph: " + t);
    topic_ids.insert(sub.index_of(t));
  }
  const double mass = (1.0 - alpha) / static_cast<double>(topic_ids.size());
  for (std::uint32_t i : topic_ids) teleport[i] = mass;
  return detail::power_iteration(sub, alpha, teleport, max_iterations, tolerance);
}

}  // namespace needpaths
