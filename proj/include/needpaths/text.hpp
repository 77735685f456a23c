// Text utilities: concept-name normalization, relation/concept word splitting,
// path serialization to token sequences, and the default stopword list.
#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <unordered_set>
#include <vector>

#include "needpaths/common.hpp"

namespace needpaths {

// Normalizes a raw surface form or ConceptNet-style URI to a concept id:
// strips the "/c/<lang>/" prefix (and any trailing URI segments such as a
// part-of-speech marker), lowercases, and joins internal whitespace runs with
// single underscores. Idempotent. Throws data_error if nothing remains.
inline std::string normalize_concept(const std::string& surface) {
  std::string core = surface;
  if (core.rfind("/c/", 0) == 0) {
    // /c/<lang>/<name>[/<extra>...] -> <name>
    std::size_t lang_end = core.find('/', 3);
    if (lang_end != std::string::npos) {
      std::size_t name_end = core.find('/', lang_end + 1);
      core = core.substr(lang_end + 1, name_end == std::string::npos
                                           ? std::string::npos
                                           : name_end - lang_end - 1);
    } else {
      core.clear();
    }
  }
  std::string out;
  out.reserve(core.size());
  bool pending_sep = false;
  for (char ch : core) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!out.empty()) pending_sep = true;
      continue;
    }
    if (pending_sep) {
      out.push_back('_');
      pending_sep = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  while (!out.empty() && out.front() == '_') out.erase(out.begin());
  if (out.empty()) throw data_error("concept empty after normalization: '" + surface + "'");
  return out;
}

// Extracts the language tag of a /c/<lang>/... URI, or "" if not a concept URI.
inline std::string uri_language(const std::string& uri) {
  if (uri.rfind("/c/", 0) != 0) return "";
  std::size_t lang_end = uri.find('/', 3);
  if (lang_end == std::string::npos) return uri.substr(3);
  return uri.substr(3, lang_end - 3);
}

// Strips a "/r/" relation URI prefix if present: "/r/CausesDesire" -> "CausesDesire".
inline std::string strip_relation_uri(const std::string& uri) {
  if (uri.rfind("/r/", 0) == 0) return uri.substr(3);
  return uri;
}

// Splits a camel-case relation name into lowercase words:
// "CausesDesire" -> {"causes","desire"}, "IsA" -> {"is","a"}.
inline std::vector<std::string> split_camel(const std::string& name) {
  std::vector<std::string> words;
  std::string cur;
  for (char ch : name) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isupper(c) && !cur.empty()) {
      words.push_back(cur);
      cur.clear();
    }
    if (std::isalnum(c)) cur.push_back(static_cast<char>(std::tolower(c)));
  }
  if (!cur.empty()) words.push_back(cur);
  return words;
}

// Splits a normalized concept id on underscores: "gold_medal" -> {"gold","medal"}.
inline std::vector<std::string> split_underscore(const std::string& name) {
  std::vector<std::string> words;
  std::string cur;
  for (char ch : name) {
    if (ch == '_') {
      if (!cur.empty()) words.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) words.push_back(cur);
  return words;
}

// Serializes a path (concept, relation, concept, ...) into the flat word
// sequence fed to the knowledge encoder; relation names are camel-split and
// concept ids underscore-split, with no direction markers.
inline std::vector<std::string> path_to_tokens(const std::vector<std::string>& concepts,
                                               const std::vector<std::string>& relations) {
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    for (auto& w : split_underscore(concepts[i])) tokens.push_back(w);
    if (i < relations.size()) {
      for (auto& w : split_camel(relations[i])) tokens.push_back(w);
    }
  }
  return tokens;
}

// Default stopword list: common function words never linked as unigrams.
inline const std::unordered_set<std::string>& default_stopwords() {
  static const std::unordered_set<std::string> kStop = {
      "a",    "an",   "the",  "and",  "or",    "but",  "if",    "then",  "so",
      "of",   "to",   "in",   "on",   "at",    "by",   "for",   "with",  "from",
      "as",   "is",   "am",   "are",  "was",   "were", "be",    "been",  "being",
      "it",   "its",  "he",   "she",  "they",  "them", "his",   "her",   "their",
      "i",    "you",  "we",   "me",   "my",    "your", "our",   "this",  "that",
      "these","those","not",  "no",   "do",    "does", "did",   "have",  "has",
      "had",  "will", "would","can",  "could", "s",    "t",     "up",    "out"};
  return kStop;
}

}  // namespace needpaths
