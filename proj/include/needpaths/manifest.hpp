// Run manifests: every artifact-producing command writes a JSON record of the
// effective config, component versions, input/output digests, and wall-clock
// timestamps, making reruns auditable.
#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "needpaths/common.hpp"

namespace needpaths {

namespace detail {

inline std::string iso8601_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

inline std::string hex_digest(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "fnv1a:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace detail

class RunManifest {
 public:
  RunManifest(std::string command, nlohmann::json config_snapshot)
      : command_(std::move(command)), config_(std::move(config_snapshot)),
        started_(detail::iso8601_utc_now()) {}

  void add_input(const std::string& path) { inputs_[path] = detail::hex_digest(fnv1a_file(path)); }
  void add_output(const std::string& path) {
    outputs_[path] = detail::hex_digest(fnv1a_file(path));
  }

  // Writes <out_dir>/<command>.manifest.json.
  std::string write(const std::string& out_dir) const {
    nlohmann::json j{{"command", command_},
                     {"config", config_},
                     {"versions",
                      {{"needpaths", kVersion}, {"graph_cache_format", 1}, {"model_format", 1}}},
                     {"inputs", inputs_},
                     {"outputs", outputs_},
                     {"started", started_},
                     {"finished", detail::iso8601_utc_now()}};
    const std::string path = out_dir + "/" + command_ + ".manifest.json";
    std::ofstream out(path);
    if (!out) throw data_error("cannot write manifest: " + path);
    out << j.dump(2) << "\n";
    return path;
  }

 private:
  std::string command_;
  nlohmann::json config_;
  std::string started_;
  nlohmann::json inputs_ = nlohmann::json::object();
  nlohmann::json outputs_ = nlohmann::json::object();
};

}  // namespace needpaths
