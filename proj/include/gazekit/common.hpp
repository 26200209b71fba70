#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gazekit {

// All recoverable failures surface as gazekit::Error with a human-readable
// message; callers match on message content where the cause matters.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {
inline void msg_append(std::ostringstream&) {}
template <class T, class... Rest>
void msg_append(std::ostringstream& os, const T& v, const Rest&... rest) {
  os << v;
  msg_append(os, rest...);
}
}  // namespace detail

template <class... Args>
std::string msg(const Args&... args) {
  std::ostringstream os;
  detail::msg_append(os, args...);
  return os.str();
}

template <class... Args>
[[noreturn]] void raise(const Args&... args) {
  throw Error(msg(args...));
}

template <class... Args>
void require(bool cond, const Args&... args) {
  if (!cond) raise(args...);
}

template <class S>
bool is_finite(S v) {
  return std::isfinite(static_cast<double>(v));
}

// FNV-1a, used for config hashes stamped into generated files.
inline uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open file: ", path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open file for writing: ", path.string());
  out << text;
  require(out.good(), "write failed: ", path.string());
}

}  // namespace gazekit
