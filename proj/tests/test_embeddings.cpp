#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "needpaths/embeddings.hpp"

using needpaths::EmbeddingTable;

TEST_CASE("loads word vectors and reports the dimension") {
  std::istringstream in(
      "rest 0.1 0.2 0.3\n"
      "win -1 0 1\n");
  auto table = EmbeddingTable::load(in);
  CHECK(table.dim() == 3);
  CHECK(table.size() == 2);
  CHECK(table.lookup("rest") == std::vector<double>{0.1, 0.2, 0.3});
  CHECK(table.contains("win"));
}

TEST_CASE("unknown words embed as the zero vector") {
  std::istringstream in("rest 0.5 0.5\n");
  auto table = EmbeddingTable::load(in);
  CHECK(table.lookup("absent") == std::vector<double>{0.0, 0.0});
  auto seq = table.embed({"rest", "absent"});
  REQUIRE(seq.size() == 2);
  CHECK(seq[1] == std::vector<double>{0.0, 0.0});
}

TEST_CASE("lines with the wrong arity are skipped with a warning") {
  std::istringstream in(
      "rest 0.1 0.2 0.3\n"
      "broken 0.1 0.2\n"
      "win 1 2 3\n"
      "junk 0.1 0.2 oops\n");
  std::vector<std::string> warnings;
  auto table = EmbeddingTable::load(in, &warnings);
  CHECK(table.size() == 2);
  REQUIRE(warnings.size() == 2);
  CHECK(warnings[0].find("line 2") != std::string::npos);
  CHECK(warnings[0].find("broken") != std::string::npos);
  CHECK(warnings[1].find("line 4") != std::string::npos);
}

TEST_CASE("the dimension comes from the first valid line") {
  std::istringstream in(
      "bad_line_without_numbers\n"
      "first 1 2\n"
      "second 3 4\n");
  std::vector<std::string> warnings;
  auto table = EmbeddingTable::load(in, &warnings);
  CHECK(table.dim() == 2);
  CHECK(table.size() == 2);
  CHECK(warnings.size() == 1);
}

TEST_CASE("a file with no valid vectors is an error") {
  std::istringstream in("only words here\n");
  CHECK_THROWS_AS(EmbeddingTable::load(in), needpaths::data_error);
  std::istringstream empty("");
  CHECK_THROWS_AS(EmbeddingTable::load(empty), needpaths::data_error);
}

TEST_CASE("blank lines and repeated words are tolerated") {
  std::istringstream in(
      "\n"
      "rest 1 1\n"
      "\n"
      "rest 2 2\n");
  auto table = EmbeddingTable::load(in);
  CHECK(table.size() == 1);
  CHECK(table.lookup("rest") == std::vector<double>{2.0, 2.0});  // last wins
}
