// Word-embedding table loaded from whitespace text (`word v1 ... vd`). The
// dimension is taken from the first valid line; lines with a different arity
// are skipped with a warning. Unknown words embed as the zero vector.
#pragma once

#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "needpaths/common.hpp"

namespace needpaths {

class EmbeddingTable {
 public:
  static EmbeddingTable load(std::istream& in, std::vector<std::string>* warnings = nullptr) {
    EmbeddingTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::istringstream row(line);
      std::string word;
      if (!(row >> word)) continue;
      std::vector<double> values;
      double v;
      while (row >> v) values.push_back(v);
      bool trailing_garbage = !row.eof();
      if (table.dim_ == 0 && !values.empty() && !trailing_garbage) {
        table.dim_ = values.size();
      }
      if (trailing_garbage || values.empty() || values.size() != table.dim_) {
        if (warnings) {
          warnings->push_back("embedding line " + std::to_string(line_no) + " skipped: expected " +
                              (table.dim_ == 0 ? std::string("a numeric vector")
                                               : std::to_string(table.dim_) + " values") +
                              " for word '" + word + "'");
        }
        continue;
      }
      table.vectors_[word] = std::move(values);
    }
    if (table.vectors_.empty()) {
      throw data_error("embedding file contains no valid vectors");
    }
    return table;
  }

  static EmbeddingTable load_file(const std::string& path,
                                  std::vector<std::string>* warnings = nullptr) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open embedding file: " + path);
    return load(in, warnings);
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  bool contains(const std::string& word) const { return vectors_.count(word) > 0; }

  // Zero vector for unknown words.
  std::vector<double> lookup(const std::string& word) const {
    auto it = vectors_.find(word);
    if (it != vectors_.end()) return it->second;
    return std::vector<double>(dim_, 0.0);
  }

  std::vector<std::vector<double>> embed(const std::vector<std::string>& tokens) const {
    std::vector<std::vector<double>> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(lookup(t));
    return out;
  }

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

}  // namespace needpaths
