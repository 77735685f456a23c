#include <catch2/catch_amalgamated.hpp>

#include "needpaths/kg.hpp"
#include "needpaths/subgraph.hpp"

using needpaths::Edge;
using needpaths::KnowledgeGraph;
using needpaths::Provenance;
using needpaths::SeedSet;
using needpaths::SubGraph;
using needpaths::data_error;
using needpaths::induce;

namespace {

// a - b - c chain with a spur d off a, plus an isolated pair e - f.
KnowledgeGraph chain_graph() {
  return KnowledgeGraph::from_edges({
      {"a", "RelatedTo", "b", 1.0},
      {"b", "RelatedTo", "c", 1.0},
      {"a", "RelatedTo", "d", 2.0},
      {"e", "RelatedTo", "f", 1.0},
  });
}

}  // namespace

TEST_CASE("induction keeps seeds, shortest-path interiors, and neighbors") {
  auto g = chain_graph();
  SeedSet seeds{{"a"}, {"c"}};
  SubGraph sub = induce(g, seeds);

  CHECK(sub.vertices() == std::vector<std::string>{"a", "b", "c", "d"});
  CHECK(sub.provenance("a") == Provenance::kSeedText);
  CHECK(sub.provenance("c") == Provenance::kSeedNeed);
  CHECK(sub.provenance("b") == Provenance::kShortestPath);
  CHECK(sub.provenance("d") == Provenance::kNeighbour);
  CHECK_FALSE(sub.contains("e"));  // unreachable from any seed
  CHECK(sub.edge_count() == 3);    // closure excludes e-f
}

TEST_CASE("seed provenance outranks later discovery of the same vertex") {
  auto g = chain_graph();
  // b is both a seed and on the a-c shortest path; the seed tag wins.
  SubGraph sub = induce(g, {{"a", "b"}, {"c"}});
  CHECK(sub.provenance("b") == Provenance::kSeedText);
  // Text outranks need when a vertex is listed in both roles.
  SubGraph sub2 = induce(g, {{"a"}, {"a", "c"}});
  CHECK(sub2.provenance("a") == Provenance::kSeedText);
}

TEST_CASE("empty or unmatched seeds are errors") {
  auto g = chain_graph();
  CHECK_THROWS_AS(induce(g, SeedSet{}), data_error);
  CHECK_THROWS_AS(induce(g, {{"nothere"}, {"alsonot"}}), data_error);
}

TEST_CASE("seeds missing from the graph are ignored when others match") {
  auto g = chain_graph();
  SubGraph sub = induce(g, {{"a", "unknown"}, {"c"}});
  CHECK(sub.contains("a"));
  CHECK_FALSE(sub.contains("unknown"));
}

TEST_CASE("max path length bounds which interiors join the subgraph") {
  // a - x1 - x2 - x3 - z is a 4-hop connection.
  KnowledgeGraph g = KnowledgeGraph::from_edges({
      {"a", "R", "x1", 1.0},
      {"x1", "R", "x2", 1.0},
      {"x2", "R", "x3", 1.0},
      {"x3", "R", "z", 1.0},
  });
  SubGraph wide = induce(g, {{"a"}, {"z"}}, 4);
  CHECK(wide.contains("x2"));
  CHECK(wide.contains("z"));
  SubGraph narrow = induce(g, {{"a"}, {"z"}}, 3);
  // No shortest path within 3 hops; z stays (it is a seed) but is pruned only
  // if disconnected. Here the neighbor expansion of {a, z} keeps x1 and x3,
  // both connected to their seeds, while x2 never enters.
  CHECK_FALSE(narrow.contains("x2"));
  CHECK(narrow.contains("x1"));
  CHECK(narrow.contains("x3"));
}

TEST_CASE("all equal-length shortest paths are collected") {
  // Two parallel length-2 routes a-b-z and a-c-z.
  KnowledgeGraph g = KnowledgeGraph::from_edges({
      {"a", "R", "b", 1.0},
      {"b", "R", "z", 1.0},
      {"a", "R", "c", 1.0},
      {"c", "R", "z", 1.0},
  });
  auto paths = needpaths::collect_shortest_paths(g, {{"a"}, {"z"}}, 4, 10);
  REQUIRE(paths.size() == 2);
  CHECK(paths[0] == std::vector<std::string>{"a", "b", "z"});
  CHECK(paths[1] == std::vector<std::string>{"a", "c", "z"});
}

TEST_CASE("per-pair shortest path budget truncates lexicographically") {
  KnowledgeGraph g = KnowledgeGraph::from_edges({
      {"a", "R", "b", 1.0},
      {"b", "R", "z", 1.0},
      {"a", "R", "c", 1.0},
      {"c", "R", "z", 1.0},
  });
  auto paths = needpaths::collect_shortest_paths(g, {{"a"}, {"z"}}, 4, 1);
  REQUIRE(paths.size() == 1);
  CHECK(paths[0] == std::vector<std::string>{"a", "b", "z"});
}

TEST_CASE("need-need pairs contribute no shortest paths") {
  KnowledgeGraph g = KnowledgeGraph::from_edges({
      {"z1", "R", "m", 1.0},
      {"m", "R", "z2", 1.0},
      {"a", "R", "z1", 1.0},
  });
  auto paths = needpaths::collect_shortest_paths(g, {{"a"}, {"z1", "z2"}}, 4, 10);
  // a-z1 (direct) and a-z1-m-z2; never z1-m-z2 on its own.
  for (const auto& p : paths) CHECK(p.front() == "a");
}

TEST_CASE("text-text pairs do contribute") {
  KnowledgeGraph g = KnowledgeGraph::from_edges({
      {"a", "R", "m", 1.0},
      {"m", "R", "b", 1.0},
  });
  auto paths = needpaths::collect_shortest_paths(g, {{"a", "b"}, {}}, 4, 10);
  REQUIRE(paths.size() == 1);
  CHECK(paths[0] == std::vector<std::string>{"a", "m", "b"});
}

TEST_CASE("neighbor cap keeps the highest-weight neighbors") {
  KnowledgeGraph g = KnowledgeGraph::from_edges({
      {"hub", "R", "w1", 1.0},
      {"hub", "R", "w2", 3.0},
      {"hub", "R", "w3", 2.0},
      {"w2", "R", "goal", 1.0},
  });
  SubGraph capped = induce(g, {{"hub"}, {"goal"}}, 4, 10, 1);
  // The single neighbor slot goes to w2 (weight 3), which is also on the
  // shortest path; w1 and w3 stay out.
  CHECK(capped.contains("w2"));
  CHECK_FALSE(capped.contains("w1"));
  CHECK_FALSE(capped.contains("w3"));

  SubGraph uncapped = induce(g, {{"hub"}, {"goal"}}, 4, 10, 0);
  CHECK(uncapped.contains("w1"));
  CHECK(uncapped.contains("w3"));
}

TEST_CASE("neighbor cap ties break lexicographically") {
  KnowledgeGraph g = KnowledgeGraph::from_edges({
      {"hub", "R", "nb", 1.0},
      {"hub", "R", "na", 1.0},
      {"hub", "R", "zz", 1.0},
  });
  auto expanded = needpaths::expand_neighbors(g, {"hub"}, 2);
  CHECK(expanded == std::set<std::string>{"hub", "na", "nb"});
}

TEST_CASE("vertices are sorted and adjacency is distinct and ordered") {
  KnowledgeGraph g = KnowledgeGraph::from_edges({
      {"b", "R1", "a", 1.0},
      {"a", "R2", "b", 2.0},  // second edge between the same vertices
      {"b", "R1", "c", 1.0},
  });
  SubGraph sub = induce(g, {{"b"}, {"a"}});
  CHECK(sub.vertices() == std::vector<std::string>{"a", "b", "c"});
  auto b_adj = sub.adjacent(sub.index_of("b"));
  REQUIRE(b_adj.size() == 2);  // a and c once each despite the double edge
  CHECK(sub.vertices()[b_adj[0]] == "a");
  CHECK(sub.vertices()[b_adj[1]] == "c");
  CHECK(sub.degree(sub.index_of("b")) == 2);
  CHECK(sub.edge_count() == 3);  // closure keeps both parallel edges
}

TEST_CASE("subgraph JSON lists vertices with provenance and all edges") {
  auto g = chain_graph();
  SubGraph sub = induce(g, {{"a"}, {"c"}});
  auto j = sub.to_json();
  REQUIRE(j.at("vertices").size() == 4);
  CHECK(j.at("vertices")[0].at("id") == "a");
  CHECK(j.at("vertices")[0].at("provenance") == "seed-text");
  CHECK(j.at("vertices")[3].at("provenance") == "neighbour");
  CHECK(j.at("edges").size() == 3);
}
