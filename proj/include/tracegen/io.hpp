#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tracegen/common.hpp"

namespace tracegen {

// All binary artifacts are little-endian. The helpers below assume a
// little-endian host (asserted once at startup by the CLI); file contents are
// byte-defined so artifacts compare equal across runs.

inline void write_u32le(std::ostream& os, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline uint32_t read_u32le(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  require(is.good(), ErrorKind::IoError, "truncated stream while reading u32");
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

inline void write_u64le(std::ostream& os, uint64_t v) {
  write_u32le(os, static_cast<uint32_t>(v & 0xffffffffULL));
  write_u32le(os, static_cast<uint32_t>(v >> 32));
}

inline uint64_t read_u64le(std::istream& is) {
  uint64_t lo = read_u32le(is);
  uint64_t hi = read_u32le(is);
  return lo | (hi << 32);
}

inline void write_f32le(std::ostream& os, const float* data, size_t count) {
  static_assert(sizeof(float) == 4);
  os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * 4));
}

inline void read_f32le(std::istream& is, float* data, size_t count) {
  is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * 4));
  require(is.good(), ErrorKind::IoError, "truncated stream while reading f32 block");
}

inline std::ofstream open_output(const std::filesystem::path& path, bool binary = true) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  require(os.is_open(), ErrorKind::IoError, "cannot open for writing: " + path.string());
  return os;
}

inline std::ifstream open_input(const std::filesystem::path& path, bool binary = true) {
  std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
  require(is.is_open(), ErrorKind::IoError, "cannot open for reading: " + path.string());
  return is;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is = open_input(path);
  std::string out((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return out;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os = open_output(path);
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  require(os.good(), ErrorKind::IoError, "short write: " + path.string());
}

// Sorted directory listing so every traversal order is reproducible.
inline std::vector<std::filesystem::path> list_dir_sorted(const std::filesystem::path& dir) {
  require(std::filesystem::is_directory(dir), ErrorKind::IoError,
          "not a directory: " + dir.string());
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline uint64_t fnv1a64(const void* data, size_t len, uint64_t seed = 0xcbf29ce484222325ULL) {
  const unsigned char* bytes = static_cast<const unsigned char*>(data);
  uint64_t h = seed;
  for (size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t fnv1a64(const std::string& s, uint64_t seed = 0xcbf29ce484222325ULL) {
  return fnv1a64(s.data(), s.size(), seed);
}

inline uint64_t hash_file(const std::filesystem::path& path) {
  std::ifstream is = open_input(path);
  uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (is.good()) {
    is.read(buf, sizeof(buf));
    std::streamsize got = is.gcount();
    if (got <= 0) break;
    h = fnv1a64(buf, static_cast<size_t>(got), h);
  }
  return h;
}

inline std::string hex64(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace tracegen
