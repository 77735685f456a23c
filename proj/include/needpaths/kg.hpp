// Immutable in-memory knowledge graph built from a ConceptNet-style edge dump.
//
// Two input formats are accepted:
//   (a) assertion dump: tab-separated, 5 fields (assertion URI, relation URI,
//       start URI, end URI, JSON metadata carrying the edge weight); may be
//       gzip-compressed;
//   (b) simplified CSV: `relation,head,tail,weight`, optional header line.
// Edges are stored directed exactly as ingested, but adjacency queries expose
// the undirected union of in- and out-edges. Exact duplicate triples collapse
// keeping the maximum weight; self-loops are dropped. After construction the
// graph is immutable and safe for concurrent readers.
#pragma once

#include <algorithm>
#include <cstring>
#include <map>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <zlib.h>

#include <nlohmann/json.hpp>

#include "needpaths/common.hpp"
#include "needpaths/text.hpp"

namespace needpaths {

struct Edge {
  std::string head;
  std::string relation;
  std::string tail;
  double weight = 0.0;
};

struct NeighborRecord {
  std::string relation;
  std::string concept_id;
  bool outgoing = true;  // true: edge head -> neighbor; false: neighbor -> queried vertex

  friend bool operator<(const NeighborRecord& a, const NeighborRecord& b) {
    return std::tie(a.concept_id, a.relation, b.outgoing) <
           std::tie(b.concept_id, b.relation, a.outgoing);
  }
  friend bool operator==(const NeighborRecord& a, const NeighborRecord& b) {
    return a.concept_id == b.concept_id && a.relation == b.relation && a.outgoing == b.outgoing;
  }
};

struct IngestReport {
  std::size_t lines_read = 0;
  std::size_t records_ingested = 0;
  std::size_t records_malformed = 0;
  std::size_t records_filtered = 0;   // language or weight threshold
  std::size_t duplicates_collapsed = 0;
  std::size_t self_loops_dropped = 0;
  std::vector<std::string> warnings;  // one entry per malformed record, with line number
};

class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  // Builds the finalized graph from deduplicated edges (any order).
  static KnowledgeGraph from_edges(std::vector<Edge> edges) {
    KnowledgeGraph g;
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      return std::tie(a.head, a.relation, a.tail) < std::tie(b.head, b.relation, b.tail);
    });
    g.edges_ = std::move(edges);
    std::map<std::string, std::uint32_t> names;  // ordered: vertex ids end up sorted
    for (const Edge& e : g.edges_) {
      names.emplace(e.head, 0);
      names.emplace(e.tail, 0);
    }
    g.vertices_.reserve(names.size());
    for (auto& [name, idx] : names) {
      idx = static_cast<std::uint32_t>(g.vertices_.size());
      g.vertices_.push_back(name);
      g.index_.emplace(name, idx);
    }
    g.out_.assign(g.vertices_.size(), {});
    g.in_.assign(g.vertices_.size(), {});
    for (std::uint32_t ei = 0; ei < g.edges_.size(); ++ei) {
      g.out_[g.index_.at(g.edges_[ei].head)].push_back(ei);
      g.in_[g.index_.at(g.edges_[ei].tail)].push_back(ei);
    }
    return g;
  }

  bool contains(const std::string& concept_id) const { return index_.count(concept_id) > 0; }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }

  // All concepts one edge away in either direction, sorted for determinism.
  std::vector<NeighborRecord> neighbors(const std::string& concept_id) const {
    std::vector<NeighborRecord> result;
    auto it = index_.find(concept_id);
    if (it == index_.end()) return result;
    for (std::uint32_t ei : out_[it->second]) {
      result.push_back({edges_[ei].relation, edges_[ei].tail, true});
    }
    for (std::uint32_t ei : in_[it->second]) {
      result.push_back({edges_[ei].relation, edges_[ei].head, false});
    }
    std::sort(result.begin(), result.end());
    return result;
  }

  // Edge indices incident to a vertex (out then in); used by subgraph induction.
  std::vector<std::uint32_t> incident_edges(const std::string& concept_id) const {
    std::vector<std::uint32_t> result;
    auto it = index_.find(concept_id);
    if (it == index_.end()) return result;
    result.insert(result.end(), out_[it->second].begin(), out_[it->second].end());
    result.insert(result.end(), in_[it->second].begin(), in_[it->second].end());
    return result;
  }

  // ------------------------------------------------------------------------
  // Binary cache (little-endian, versioned).

  void save_cache(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write graph cache: " + path);
    out.write("NPGC", 4);
    detail::write_u32(out, 1);
    detail::write_u64(out, vertices_.size());
    detail::write_u64(out, edges_.size());
    for (const auto& v : vertices_) detail::write_str(out, v);
    for (const Edge& e : edges_) {
      detail::write_u32(out, index_.at(e.head));
      detail::write_u32(out, index_.at(e.tail));
      detail::write_str(out, e.relation);
      detail::write_f64(out, e.weight);
    }
    if (!out) throw data_error("graph cache write failed: " + path);
  }

  static KnowledgeGraph load_cache(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot read graph cache: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "NPGC", 4) != 0)
      throw data_error("not a graph cache file: " + path);
    if (detail::read_u32(in) != 1) throw data_error("unsupported graph cache version: " + path);
    std::uint64_t nv = detail::read_u64(in), ne = detail::read_u64(in);
    std::vector<std::string> verts(nv);
    for (auto& v : verts) v = detail::read_str(in);
    std::vector<Edge> edges(ne);
    for (auto& e : edges) {
      std::uint32_t h = detail::read_u32(in), t = detail::read_u32(in);
      e.relation = detail::read_str(in);
      e.weight = detail::read_f64(in);
      if (h >= nv || t >= nv) throw data_error("corrupt graph cache: " + path);
      e.head = verts[h];
      e.tail = verts[t];
    }
    if (!in) throw data_error("truncated graph cache: " + path);
    return from_edges(std::move(edges));
  }

 private:
  std::vector<std::string> vertices_;  // sorted lexicographically
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<Edge> edges_;  // sorted by (head, relation, tail)
  std::vector<std::vector<std::uint32_t>> out_, in_;
};

namespace detail {

// Line reader over plain or gzip files (zlib reads uncompressed files too).
class GzLineReader {
 public:
  explicit GzLineReader(const std::string& path) : file_(gzopen(path.c_str(), "rb")) {
    if (file_ == nullptr) throw config_error("cannot open file: " + path);
  }
  ~GzLineReader() {
    if (file_ != nullptr) gzclose(file_);
  }
  GzLineReader(const GzLineReader&) = delete;
  GzLineReader& operator=(const GzLineReader&) = delete;

  bool next(std::string& line) {
    line.clear();
    char buf[1 << 14];
    bool got_any = false;
    while (true) {
      if (gzgets(file_, buf, sizeof buf) == nullptr) return got_any;
      got_any = true;
      line += buf;
      if (!line.empty() && line.back() == '\n') {
        line.pop_back();
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
      }
    }
  }

 private:
  gzFile file_;
};

inline std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(s.substr(start));
      break;
    }
    fields.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

inline std::string lower_trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace detail

/// Ingests an edge dump (format auto-detected per line content: tab-separated
// assertion rows vs. comma-separated simple rows). Throws data_error if no
// edges survive filtering.
inline KnowledgeGraph ingest_edges(const std::string& path, const std::string& language_filter,
                                   double min_weight, IngestReport* report = nullptr) {
  IngestReport local;
  IngestReport& rep = report != nullptr ? *report : local;
  std::map<std::tuple<std::string, std::string, std::string>, double> triples;

  detail::GzLineReader reader(path);
  std::string line;
  std::size_t line_no = 0;
  auto warn = [&](const std::string& msg) {
    ++rep.records_malformed;
    rep.warnings.push_back("line " + std::to_string(line_no) + ": " + msg);
  };

  while (reader.next(line)) {
    ++line_no;
    ++rep.lines_read;
    if (line.empty()) continue;
    std::string relation, head_raw, tail_raw;
    double weight = 0.0;
    if (line.find('\t') != std::string::npos) {
      auto f = detail::split_on(line, '\t');
      if (f.size() < 5) {
        warn("expected 5 tab-separated fields, got " + std::to_string(f.size()));
        continue;
      }
      if (!language_filter.empty() &&
          (uri_language(f[2]) != language_filter || uri_language(f[3]) != language_filter)) {
        ++rep.records_filtered;
        continue;
      }
      relation = strip_relation_uri(f[1]);
      head_raw = f[2];
      tail_raw = f[3];
      try {
        auto meta = nlohmann::json::parse(f[4]);
        weight = meta.at("weight").get<double>();
      } catch (const std::exception&) {
        warn("unparseable metadata (expected JSON object with \"weight\")");
        continue;
      }
    } else {
      auto f = detail::split_on(line, ',');
      if (line_no == 1 && f.size() == 4 && detail::lower_trim(f[0]) == "relation" &&
          detail::lower_trim(f[1]) == "head" && detail::lower_trim(f[2]) == "tail" &&
          detail::lower_trim(f[3]) == "weight") {
        continue;  // header line
      }
      if (f.size() != 4) {
        warn("expected 4 comma-separated fields, got " + std::to_string(f.size()));
        continue;
      }
      relation = f[0];
      head_raw = f[1];
      tail_raw = f[2];
      try {
        std::size_t used = 0;
        weight = std::stod(f[3], &used);
      } catch (const std::exception&) {
        warn("unparseable weight: '" + f[3] + "'");
        continue;
      }
    }
    if (relation.empty()) {
      warn("empty relation");
      continue;
    }
    if (weight < 0.0) {
      warn("negative weight");
      continue;
    }
    if (weight < min_weight) {
      ++rep.records_filtered;
      continue;
    }
    std::string head, tail;
    try {
      head = normalize_concept(head_raw);
      tail = normalize_concept(tail_raw);
    } catch (const data_error& e) {
      warn(e.what());
      continue;
    }
    if (head == tail) {
      ++rep.self_loops_dropped;
      continue;
    }
    auto key = std::make_tuple(head, relation, tail);
    auto [it, inserted] = triples.emplace(key, weight);
    if (!inserted) {
      ++rep.duplicates_collapsed;
      it->second = std::max(it->second, weight);
    } else {
      ++rep.records_ingested;
    }
  }

  if (triples.empty()) throw data_error("no edges ingested from " + path);
  std::vector<Edge> edges;
  edges.reserve(triples.size());
  for (const auto& [key, w] : triples) {
    edges.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), w});
  }
  return KnowledgeGraph::from_edges(std::move(edges));
}

}  // namespace needpaths
