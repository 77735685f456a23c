// Shared plumbing: error taxonomy, version, hashing, deterministic randomness.
//
// Every stochastic component in the library draws from the helpers here so that
// a fixed seed yields bit-identical behavior across platforms: uniform doubles
// are derived from the top 53 bits of a mt19937_64 draw, and shuffles use an
// explicit Fisher-Yates loop over those doubles.
#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace needpaths {

inline constexpr const char* kVersion = "1.0.0";

// Usage/configuration problems: bad flags, malformed config, missing inputs.
// The CLI maps these to exit code 2.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Data/runtime problems: malformed records, empty graphs, numeric blow-ups.
// The CLI maps these to exit code 1.
class data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --------------------------------------------------------------------------
// FNV-1a 64-bit hashing (stable across platforms; used for file digests and
// per-instance seed mixing).

inline std::uint64_t fnv1a(const void* data, std::size_t len,
                           std::uint64_t seed = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

// Digest of a whole file's bytes; throws config_error if unreadable.
inline std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot read file for digest: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    h = fnv1a(buf, static_cast<std::size_t>(in.gcount()), h);
    if (!in) break;
  }
  return h;
}

// --------------------------------------------------------------------------
// Deterministic randomness.

// Uniform double in [0, 1) from the top 53 bits of one 64-bit draw.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in [lo, hi).
inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

// Uniform integer in [0, n) via the unit draw (n must be > 0).
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  auto i = static_cast<std::size_t>(uniform_unit(rng) * static_cast<double>(n));
  return i >= n ? n - 1 : i;
}

// In-place Fisher-Yates shuffle driven by uniform_index.
template <typename T>
void fisher_yates(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

// --------------------------------------------------------------------------
// Explicit little-endian binary I/O, shared by the graph cache and the model
// container so serialized artifacts are byte-identical across platforms.

namespace detail {

inline void write_u32(std::ostream& o, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  o.write(reinterpret_cast<char*>(b), 4);
}

inline void write_u64(std::ostream& o, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  o.write(reinterpret_cast<char*>(b), 8);
}

inline void write_f64(std::ostream& o, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, 8);
  write_u64(o, v);
}

inline void write_str(std::ostream& o, const std::string& s) {
  write_u32(o, static_cast<std::uint32_t>(s.size()));
  o.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::uint32_t read_u32(std::istream& i) {
  unsigned char b[4] = {0, 0, 0, 0};
  i.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int k = 3; k >= 0; --k) v = (v << 8) | b[k];
  return v;
}

inline std::uint64_t read_u64(std::istream& i) {
  unsigned char b[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  i.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int k = 7; k >= 0; --k) v = (v << 8) | b[k];
  return v;
}

inline double read_f64(std::istream& i) {
  std::uint64_t v = read_u64(i);
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}

inline std::string read_str(std::istream& i) {
  std::uint32_t n = read_u32(i);
  std::string s(n, '\0');
  i.read(s.data(), n);
  return s;
}

}  // namespace detail

}  // namespace needpaths
