// Label inventories (Maslow / Reiss), label-to-concept mapping with the three
// built-in exception pairs, greedy longest-match text-to-concept linking, and
// instance loading from JSON lines.
#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "needpaths/common.hpp"
#include "needpaths/kg.hpp"
#include "needpaths/text.hpp"

namespace needpaths {

enum class LabelTheory { kMaslow, kReiss };

inline const char* label_theory_name(LabelTheory t) {
  return t == LabelTheory::kMaslow ? "maslow" : "reiss";
}

inline LabelTheory parse_label_theory(const std::string& name) {
  if (name == "maslow") return LabelTheory::kMaslow;
  if (name == "reiss") return LabelTheory::kReiss;
  throw config_error("unknown label theory: " + name + " (expected maslow or reiss)");
}

struct LabelSet {
  LabelTheory theory = LabelTheory::kMaslow;
  std::vector<std::string> labels;  // fixed order for the lifetime of a model

  static LabelSet make(LabelTheory theory) {
    LabelSet s;
    s.theory = theory;
    if (theory == LabelTheory::kMaslow) {
      s.labels = {"physiological", "stability", "love", "esteem", "spiritual"};
    } else {
      s.labels = {"approval",    "belonging", "competition", "contact", "curiosity",
                  "family",      "food",      "health",      "honor",   "idealism",
                  "independent", "order",     "power",       "rest",    "romance",
                  "safety",      "savings",   "serenity",    "status"};
    }
    return s;
  }

  bool contains(const std::string& label) const {
    return std::find(labels.begin(), labels.end(), label) != labels.end();
  }

  std::size_t index_of(const std::string& label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw data_error("label not in label set: " + label);
    return static_cast<std::size_t>(it - labels.begin());
  }

  // Active label set with the given labels removed, order preserved. Unknown
  // names in `drop` are a configuration error.
  LabelSet without(const std::set<std::string>& drop) const {
    for (const auto& d : drop) {
      if (!contains(d)) {
        throw config_error("drop_labels entry is not a " + std::string(label_theory_name(theory)) +
                           " label: " + d);
      }
    }
    LabelSet s;
    s.theory = theory;
    for (const auto& l : labels) {
      if (drop.count(l) == 0) s.labels.push_back(l);
    }
    return s;
  }
};

using LabelConceptMap = std::map<std::string, std::string>;

// The label/concept alignment table pairs three need names with differently
// named concepts. The table's direction is ambiguous, so both readings ship
// as presets; the default takes the need-name column as the dataset label.
enum class ExceptionPreset { kDefault, kSwapped };

inline ExceptionPreset parse_exception_preset(const std::string& name) {
  if (name == "default") return ExceptionPreset::kDefault;
  if (name == "swapped") return ExceptionPreset::kSwapped;
  throw config_error("unknown label exception preset: " + name +
                     " (expected default or swapped)");
}

inline const LabelConceptMap& exception_map(ExceptionPreset preset) {
  static const LabelConceptMap as_written{
      {"safety", "tranquility"}, {"calm", "serenity"}, {"social", "contact"}};
  static const LabelConceptMap swapped{
      {"tranquility", "safety"}, {"serenity", "calm"}, {"contact", "social"}};
  return preset == ExceptionPreset::kDefault ? as_written : swapped;
}

// Identity mapping, then the built-in exception pairs, then user overrides.
inline LabelConceptMap label_concepts(const LabelSet& label_set,
                                      const LabelConceptMap& overrides = {},
                                      ExceptionPreset preset = ExceptionPreset::kDefault) {
  for (const auto& [label, concept_id] : overrides) {
    if (!label_set.contains(label)) {
      throw config_error("label override key is not an active label: " + label);
    }
  }
  LabelConceptMap out;
  const LabelConceptMap& exceptions = exception_map(preset);
  for (const auto& label : label_set.labels) {
    auto it = exceptions.find(label);
    out[label] = it != exceptions.end() ? it->second : label;
  }
  for (const auto& [label, concept_id] : overrides) out[label] = concept_id;
  return out;
}

// Warnings for mapped concepts missing from the graph; mappings are kept.
inline std::vector<std::string> missing_concept_warnings(const LabelConceptMap& map,
                                                         const KnowledgeGraph& graph) {
  std::vector<std::string> warnings;
  for (const auto& [label, concept_id] : map) {
    if (!graph.contains(concept_id)) {
      warnings.push_back("label '" + label + "' maps to concept '" + concept_id +
                         "' which is not in the graph");
    }
  }
  return warnings;
}

namespace detail {

inline std::string trim_copy(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

// Parses a label-override file: `label=concept` lines, `#` comments, blank
// lines ignored.
inline LabelConceptMap parse_overrides(std::istream& in) {
  LabelConceptMap out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = detail::trim_copy(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw config_error("override file line " + std::to_string(line_no) +
                         ": expected label=concept, got: " + trimmed);
    }
    std::string label = detail::trim_copy(trimmed.substr(0, eq));
    std::string concept_id = detail::trim_copy(trimmed.substr(eq + 1));
    if (label.empty() || concept_id.empty()) {
      throw config_error("override file line " + std::to_string(line_no) +
                         ": empty label or concept");
    }
    out[label] = concept_id;
  }
  return out;
}

// Greedy longest-match left-to-right linking: at each position, n-grams from
// max_ngram down to 1 are normalized (tokens joined by underscores) and the
// first one present in the graph is emitted; the scan then continues past it.
// Stopword unigrams are never emitted alone. Output preserves first-occurrence
// order, deduplicated.
inline std::vector<std::string> link_text(const std::vector<std::string>& tokens,
                                          const KnowledgeGraph& graph, int max_ngram = 3,
                                          const std::unordered_set<std::string>& stopwords =
                                              default_stopwords()) {
  if (max_ngram < 1) throw config_error("max_ngram must be at least 1");
  std::vector<std::string> out;
  std::set<std::string> seen;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t advance = 1;
    for (int n = std::min<int>(max_ngram, static_cast<int>(tokens.size() - i)); n >= 1; --n) {
      std::string joined;
      for (int t = 0; t < n; ++t) {
        if (t > 0) joined += '_';
        joined += tokens[i + static_cast<std::size_t>(t)];
      }
      std::string normalized;
      try {
        normalized = normalize_concept(joined);
      } catch (const data_error&) {
        continue;  // nothing linkable in this n-gram (e.g. punctuation only)
      }
      if (n == 1 && stopwords.count(normalized) > 0) continue;
      if (!graph.contains(normalized)) continue;
      if (seen.insert(normalized).second) out.push_back(normalized);
      advance = static_cast<std::size_t>(n);
      break;
    }
    i += advance;
  }
  return out;
}

// --- instances ---------------------------------------------------------------

struct Instance {
  std::string instance_id;
  std::string story_id;
  int line_no = 1;
  std::vector<std::vector<std::string>> context_sentences;  // one token list per sentence
  std::vector<std::string> sentence_tokens;
  std::string character;
  std::vector<std::string> gold_labels;  // sorted, unique

  bool operator==(const Instance&) const = default;

  // Context flattened in sentence order, for the sequence encoder.
  std::vector<std::string> context_tokens() const {
    std::vector<std::string> out;
    for (const auto& s : context_sentences) out.insert(out.end(), s.begin(), s.end());
    return out;
  }

  // Tokens scanned by concept linking: the directly preceding context
  // sentence (if any) followed by the sentence itself. The character name is
  // excluded.
  std::vector<std::string> linkable_tokens() const {
    std::vector<std::string> out;
    if (!context_sentences.empty()) {
      const auto& last = context_sentences.back();
      out.insert(out.end(), last.begin(), last.end());
    }
    out.insert(out.end(), sentence_tokens.begin(), sentence_tokens.end());
    return out;
  }

  nlohmann::json to_json() const {
    return {{"instance_id", instance_id}, {"story_id", story_id},
            {"line_no", line_no},         {"context", context_sentences},
            {"sentence", sentence_tokens}, {"character", character},
            {"labels", gold_labels}};
  }
};

namespace detail {

inline std::vector<std::string> token_array(const nlohmann::json& j, const std::string& field,
                                            std::size_t line_no) {
  if (!j.is_array()) {
    throw data_error("instance line " + std::to_string(line_no) + ": field '" + field +
                     "' must be an array of strings");
  }
  std::vector<std::string> out;
  for (const auto& t : j) {
    if (!t.is_string()) {
      throw data_error("instance line " + std::to_string(line_no) + ": field '" + field +
                       "' must contain only strings");
    }
    out.push_back(t.get<std::string>());
  }
  return out;
}

}  // namespace detail

inline Instance instance_from_json(const nlohmann::json& j, const LabelSet& label_set,
                                   const std::set<std::string>& drop_labels,
                                   std::size_t line_no) {
  auto require = [&](const char* field) -> const nlohmann::json& {
    auto it = j.find(field);
    if (it == j.end()) {
      throw data_error("instance line " + std::to_string(line_no) + ": missing field '" +
                       field + "'");
    }
    return *it;
  };
  Instance inst;
  const auto& id = require("instance_id");
  if (!id.is_string()) {
    throw data_error("instance line " + std::to_string(line_no) + ": instance_id must be a string");
  }
  inst.instance_id = id.get<std::string>();
  const auto& story = require("story_id");
  if (!story.is_string()) {
    throw data_error("instance line " + std::to_string(line_no) + ": story_id must be a string");
  }
  inst.story_id = story.get<std::string>();
  const auto& ln = require("line_no");
  if (!ln.is_number_integer() || ln.get<int>() < 1) {
    throw data_error("instance line " + std::to_string(line_no) +
                     ": line_no must be an integer >= 1");
  }
  inst.line_no = ln.get<int>();
  const auto& ctx = require("context");
  if (!ctx.is_array()) {
    throw data_error("instance line " + std::to_string(line_no) +
                     ": context must be an array of token arrays");
  }
  for (const auto& sent : ctx) {
    inst.context_sentences.push_back(detail::token_array(sent, "context", line_no));
  }
  inst.sentence_tokens = detail::token_array(require("sentence"), "sentence", line_no);
  if (inst.sentence_tokens.empty()) {
    throw data_error("instance line " + std::to_string(line_no) + ": sentence must be non-empty");
  }
  const auto& ch = require("character");
  if (!ch.is_string()) {
    throw data_error("instance line " + std::to_string(line_no) + ": character must be a string");
  }
  inst.character = ch.get<std::string>();
  if (auto it = j.find("labels"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) {
      throw data_error("instance line " + std::to_string(line_no) +
                       ": labels must be an array of strings");
    }
    std::set<std::string> kept;
    for (const auto& l : *it) {
      if (!l.is_string()) {
        throw data_error("instance line " + std::to_string(line_no) +
                         ": labels must contain only strings");
      }
      std::string name = l.get<std::string>();
      if (drop_labels.count(name) > 0) continue;
      if (!label_set.contains(name)) {
        std::string valid;
        for (const auto& v : label_set.labels) {
          if (!valid.empty()) valid += ", ";
          valid += v;
        }
        throw data_error("instance line " + std::to_string(line_no) + ": unknown label '" + name +
                         "' (valid labels: " + valid + ")");
      }
      kept.insert(name);
    }
    inst.gold_labels.assign(kept.begin(), kept.end());
  }
  return inst;
}

// Loads JSON-lines instances. Labels are filtered to label_set minus
// drop_labels; dropped names disappear silently, any other unknown name is an
// error naming the valid labels. Instances whose gold set becomes empty are
// kept.
inline std::vector<Instance> load_instances(std::istream& in, const LabelSet& label_set,
                                            const std::set<std::string>& drop_labels = {}) {
  std::vector<Instance> out;
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
      throw data_error("instance line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) {
      throw data_error("instance line " + std::to_string(line_no) + ": expected a JSON object");
    }
    out.push_back(instance_from_json(j, label_set, drop_labels, line_no));
  }
  return out;
}

}  // namespace needpaths
