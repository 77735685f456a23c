#include <catch2/catch_amalgamated.hpp>

#include "needpaths/scoring.hpp"
#include "needpaths/subgraph.hpp"
#include "support/oracles.hpp"

using needpaths::Edge;
using needpaths::Provenance;
using needpaths::SubGraph;
using needpaths::vscore_cc;
using needpaths::vscore_ppr;
using needpaths::vscore_pr;

namespace {

SubGraph from_edge_list(const std::vector<std::pair<std::string, std::string>>& pairs,
                        std::vector<std::string> extra_vertices = {}) {
  std::vector<std::pair<std::string, Provenance>> tagged;
  std::set<std::string> seen;
  std::vector<Edge> edges;
  for (const auto& [a, b] : pairs) {
    edges.push_back({a, "R", b, 1.0});
    seen.insert(a);
    seen.insert(b);
  }
  for (const auto& v : extra_vertices) seen.insert(v);
  for (const auto& v : seen) tagged.emplace_back(v, Provenance::kSeedText);
  return SubGraph::build(std::move(tagged), std::move(edges));
}

}  // namespace

TEST_CASE("closeness on the three-vertex chain") {
  SubGraph sub = from_edge_list({{"a", "b"}, {"b", "c"}});
  auto scores = vscore_cc(sub);
  // Middle vertex: 3 / (1 + 1) = 1.5; ends: 3 / (1 + 2) = 1.0.
  CHECK(scores[sub.index_of("a")] == 1.0);
  CHECK(scores[sub.index_of("b")] == 1.5);
  CHECK(scores[sub.index_of("c")] == 1.0);
}

TEST_CASE("closeness on the complete four-vertex graph") {
  SubGraph sub = from_edge_list(
      {{"a", "b"}, {"a", "c"}, {"a", "d"}, {"b", "c"}, {"b", "d"}, {"c", "d"}});
  auto scores = vscore_cc(sub);
  for (double s : scores) CHECK(s == Catch::Approx(4.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("closeness treats components independently and singletons score zero") {
  SubGraph sub = from_edge_list({{"a", "b"}, {"b", "c"}, {"x", "y"}}, {"lone"});
  auto scores = vscore_cc(sub);
  CHECK(scores[sub.index_of("b")] == 1.5);       // chain unaffected by the pair
  CHECK(scores[sub.index_of("x")] == 2.0);       // 2 / 1
  CHECK(scores[sub.index_of("lone")] == 0.0);
}

TEST_CASE("closeness matches the all-pairs reference on assorted graphs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 2 + needpaths::uniform_index(rng, 9);  // 2..10
    std::vector<std::pair<std::string, std::string>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (needpaths::uniform_unit(rng) < 0.35) {
          pairs.emplace_back("v" + std::to_string(i), "v" + std::to_string(j));
        }
      }
    }
    std::vector<std::string> all;
    for (std::size_t i = 0; i < n; ++i) all.push_back("v" + std::to_string(i));
    SubGraph sub = from_edge_list(pairs, all);
    auto got = vscore_cc(sub);
    auto want = oracle::closeness(oracle::dense_view(sub));
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i] == Catch::Approx(want[i]).margin(1e-12));
    }
  }
}

TEST_CASE("pagerank sums to one and is uniform on a cycle") {
  SubGraph sub = from_edge_list({{"a", "b"}, {"b", "c"}, {"c", "d"}, {"d", "a"}});
  auto scores = vscore_pr(sub, 0.85);
  double total = 0.0;
  for (double s : scores) total += s;
  CHECK(total == Catch::Approx(1.0).margin(1e-12));
  for (double s : scores) CHECK(s == Catch::Approx(0.25).margin(1e-9));
}

TEST_CASE("pagerank favors the hub of a star") {
  SubGraph sub = from_edge_list({{"hub", "s1"}, {"hub", "s2"}, {"hub", "s3"}});
  auto scores = vscore_pr(sub, 0.85);
  double hub = scores[sub.index_of("hub")];
  for (const char* leaf : {"s1", "s2", "s3"}) {
    CHECK(hub > scores[sub.index_of(leaf)]);
  }
}

TEST_CASE("pagerank matches the dense-matrix reference") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 2 + needpaths::uniform_index(rng, 9);
    std::vector<std::pair<std::string, std::string>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (needpaths::uniform_unit(rng) < 0.4) {
          pairs.emplace_back("v" + std::to_string(i), "v" + std::to_string(j));
        }
      }
    }
    std::vector<std::string> all;
    for (std::size_t i = 0; i < n; ++i) all.push_back("v" + std::to_string(i));
    SubGraph sub = from_edge_list(pairs, all);
    auto got = vscore_pr(sub, 0.85);
    auto dense = oracle::dense_view(sub);
    auto want = oracle::pagerank(dense, 0.85, oracle::uniform_teleport(dense.n, 0.85));
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i] == Catch::Approx(want[i]).margin(1e-6));
    }
  }
}

TEST_CASE("personalized pagerank concentrates mass near the topic") {
  // Path graph; topic at one end.
  SubGraph sub = from_edge_list({{"a", "b"}, {"b", "c"}, {"c", "d"}, {"d", "e"}});
  auto scores = vscore_ppr(sub, {"a"}, 0.85);
  CHECK(scores[sub.index_of("a")] > scores[sub.index_of("c")]);
  CHECK(scores[sub.index_of("b")] > scores[sub.index_of("d")]);
  double total = 0.0;
  for (double s : scores) total += s;
  CHECK(total == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("personalized pagerank with every vertex as topic equals pagerank") {
  SubGraph sub = from_edge_list({{"a", "b"}, {"b", "c"}, {"a", "c"}, {"c", "d"}});
  auto pr = vscore_pr(sub, 0.85);
  auto ppr = vscore_ppr(sub, {"a", "b", "c", "d"}, 0.85);
  for (std::size_t i = 0; i < pr.size(); ++i) {
    CHECK(ppr[i] == Catch::Approx(pr[i]).margin(1e-12));
  }
}

TEST_CASE("personalized pagerank matches the dense-matrix reference") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 3 + needpaths::uniform_index(rng, 8);
    std::vector<std::pair<std::string, std::string>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (needpaths::uniform_unit(rng) < 0.4) {
          pairs.emplace_back("v" + std::to_string(i), "v" + std::to_string(j));
        }
      }
    }
    std::vector<std::string> all;
    for (std::size_t i = 0; i < n; ++i) all.push_back("v" + std::to_string(i));
    SubGraph sub = from_edge_list(pairs, all);
    std::vector<std::string> topic{"v0"};
    if (n > 4) topic.push_back("v3");
    std::set<std::size_t> topic_ids;
    for (const auto& t : topic) topic_ids.insert(sub.index_of(t));
    auto got = vscore_ppr(sub, topic, 0.85);
    auto dense = oracle::dense_view(sub);
    auto want = oracle::pagerank(dense, 0.85, oracle::topic_teleport(dense.n, 0.85, topic_ids));
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i] == Catch::Approx(want[i]).margin(1e-6));
    }
  }
}

TEST_CASE("personalized pagerank validates its topic set") {
  SubGraph sub = from_edge_list({{"a", "b"}});
  CHECK_THROWS_AS(vscore_ppr(sub, {}), needpaths::data_error);
  CHECK_THROWS_AS(vscore_ppr(sub, {"zz"}), needpaths::data_error);
}
