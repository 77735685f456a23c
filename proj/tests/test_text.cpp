#include <catch2/catch_amalgamated.hpp>

#include "needpaths/text.hpp"

using needpaths::data_error;
using needpaths::normalize_concept;
using needpaths::path_to_tokens;
using needpaths::split_camel;
using needpaths::split_underscore;
using needpaths::strip_relation_uri;
using needpaths::uri_language;

TEST_CASE("concept normalization strips URI prefixes") {
  CHECK(normalize_concept("/c/en/gold_medal") == "gold_medal");
  CHECK(normalize_concept("/c/en/gold_medal/n") == "gold_medal");
  CHECK(normalize_concept("/c/fr/or") == "or");
}

TEST_CASE("concept normalization lowercases and joins whitespace") {
  CHECK(normalize_concept("Gold Medal") == "gold_medal");
  CHECK(normalize_concept("  Gold   Medal  ") == "gold_medal");
  CHECK(normalize_concept("TAB\tseparated") == "tab_separated");
  CHECK(normalize_concept("already_normal") == "already_normal");
}

TEST_CASE("concept normalization is idempotent") {
  const std::vector<std::string> samples = {
      "/c/en/gold_medal", "Gold Medal", "  spaced   out  ", "MixedCase Words",
      "a_b_c",            "x",          "Hello\tWorld",     "/c/en/run/v/wn",
  };
  for (const auto& s : samples) {
    std::string once = normalize_concept(s);
    CHECK(normalize_concept(once) == once);
  }
}

TEST_CASE("concept normalization rejects empty results") {
  CHECK_THROWS_AS(normalize_concept(""), data_error);
  CHECK_THROWS_AS(normalize_concept("   "), data_error);
  CHECK_THROWS_AS(normalize_concept("/c/en"), data_error);
}

TEST_CASE("uri language extraction") {
  CHECK(uri_language("/c/en/gold_medal") == "en");
  CHECK(uri_language("/c/ja/hashiru") == "ja");
  CHECK(uri_language("gold_medal") == "");
}

TEST_CASE("relation URI prefix stripping") {
  CHECK(strip_relation_uri("/r/CausesDesire") == "CausesDesire");
  CHECK(strip_relation_uri("CausesDesire") == "CausesDesire");
}

TEST_CASE("camel-case relation splitting") {
  CHECK(split_camel("CausesDesire") == std::vector<std::string>{"causes", "desire"});
  CHECK(split_camel("IsA") == std::vector<std::string>{"is", "a"});
  CHECK(split_camel("MotivatedByGoal") == std::vector<std::string>{"motivated", "by", "goal"});
  CHECK(split_camel("RelatedTo") == std::vector<std::string>{"related", "to"});
  CHECK(split_camel("causes") == std::vector<std::string>{"causes"});
}

TEST_CASE("underscore concept splitting") {
  CHECK(split_underscore("gold_medal") == std::vector<std::string>{"gold", "medal"});
  CHECK(split_underscore("rest") == std::vector<std::string>{"rest"});
  CHECK(split_underscore("a__b") == std::vector<std::string>{"a", "b"});
}

TEST_CASE("path serialization interleaves split concepts and relations") {
  std::vector<std::string> concepts = {"gold_medal", "win", "pride"};
  std::vector<std::string> relations = {"RelatedTo", "Causes"};
  CHECK(path_to_tokens(concepts, relations) ==
        std::vector<std::string>{"gold", "medal", "related", "to", "win", "causes", "pride"});
}

TEST_CASE("path serialization of a single planted hop") {
  CHECK(path_to_tokens({"cuelove", "love"}, {"CausesDesire"}) ==
        std::vector<std::string>{"cuelove", "causes", "desire", "love"});
}

TEST_CASE("default stopwords include core function words") {
  const auto& stop = needpaths::default_stopwords();
  CHECK(stop.count("the") == 1);
  CHECK(stop.count("a") == 1);
  CHECK(stop.count("marathon") == 0);
}
