#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "tracegen/image.hpp"
#include "tracegen/io.hpp"
#include "tracegen/parallel.hpp"
#include "tracegen/rng.hpp"

namespace tracegen {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("tracegen_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

TEST(Rng, DeterministicAcrossInstances) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.next_u64(), b.next_u64());
  }
  Rng c(42), d(43);
  EXPECT_NE(c.next_u64(), d.next_u64());
}

TEST(Rng, UniformInRange) {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Rng, NormalMoments) {
  Rng rng(2);
  double sum = 0, sum_sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double x = rng.normal();
    sum += x;
    sum_sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sum_sq / n, 1.0, 0.02);
}

TEST(Rng, DerivedSeedsDiffer) {
  uint64_t base = 42;
  EXPECT_NE(derive_seed(base, 0), derive_seed(base, 1));
  EXPECT_NE(derive_seed(base, 0), derive_seed(base + 1, 0));
  EXPECT_EQ(derive_seed(base, 7), derive_seed(base, 7));
}

TEST(Rng, UniformIndexBounds) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_LT(rng.uniform_index(10), 10u);
  }
}

TEST(Io, U32RoundTrip) {
  std::stringstream ss;
  write_u32le(ss, 0xdeadbeefu);
  write_u32le(ss, 7u);
  EXPECT_EQ(read_u32le(ss), 0xdeadbeefu);
  EXPECT_EQ(read_u32le(ss), 7u);
}

TEST(Io, U32LittleEndianLayout) {
  std::stringstream ss;
  write_u32le(ss, 0x01020304u);
  std::string bytes = ss.str();
  ASSERT_EQ(bytes.size(), 4u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[0]), 0x04);
  EXPECT_EQ(static_cast<unsigned char>(bytes[3]), 0x01);
}

TEST(Io, TruncatedReadThrows) {
  std::stringstream ss;
  ss << "ab";
  EXPECT_THROW(read_u32le(ss), Error);
}

TEST(Io, Fnv1aKnownVector) {
  // Reference value for FNV-1a 64 of "hello" (public test vector).
  EXPECT_EQ(fnv1a64(std::string("hello")), 0xa430d84680aabd0bULL);
}

TEST(Io, TextFileRoundTrip) {
  TempDir tmp;
  fs::path p = tmp.path() / "note.txt";
  write_text_file(p, "line1\nline2");
  EXPECT_EQ(read_text_file(p), "line1\nline2");
  EXPECT_EQ(hash_file(p), fnv1a64(std::string("line1\nline2")));
}

TEST(Io, ListDirSortedIsSorted) {
  TempDir tmp;
  write_text_file(tmp.path() / "b.txt", "b");
  write_text_file(tmp.path() / "a.txt", "a");
  write_text_file(tmp.path() / "c.txt", "c");
  auto entries = list_dir_sorted(tmp.path());
  ASSERT_EQ(entries.size(), 3u);
  EXPECT_EQ(entries[0].filename(), "a.txt");
  EXPECT_EQ(entries[2].filename(), "c.txt");
}

TEST(Image, PngRoundTrip) {
  TempDir tmp;
  Image8 im = Image8::filled(17, 9, 10, 20, 30);
  // Non-uniform content so row strides are exercised.
  for (int y = 0; y < im.height; ++y) {
    for (int x = 0; x < im.width; ++x) {
      uint8_t* px = im.at(x, y);
      px[0] = static_cast<uint8_t>(x * 13 + y);
      px[1] = static_cast<uint8_t>(y * 7);
      px[2] = static_cast<uint8_t>((x + y) * 3);
    }
  }
  fs::path p = tmp.path() / "im.png";
  write_png(p, im);
  Image8 back = read_png(p);
  ASSERT_EQ(back.width, im.width);
  ASSERT_EQ(back.height, im.height);
  EXPECT_EQ(back.pixels, im.pixels);
}

TEST(Image, PngDeterministicBytes) {
  TempDir tmp;
  Image8 im = Image8::filled(33, 21, 1, 2, 3);
  im.at(5, 5)[0] = 200;
  write_png(tmp.path() / "a.png", im);
  write_png(tmp.path() / "b.png", im);
  EXPECT_EQ(hash_file(tmp.path() / "a.png"), hash_file(tmp.path() / "b.png"));
}

TEST(Image, DepthF32RoundTrip) {
  TempDir tmp;
  ImageF im = ImageF::filled(5, 4, 0.0f);
  for (size_t i = 0; i < im.values.size(); ++i) im.values[i] = 0.25f * i;
  fs::path p = tmp.path() / "d.f32";
  write_depth_f32(p, im);
  ImageF back = read_depth_f32(p);
  ASSERT_EQ(back.width, 5);
  ASSERT_EQ(back.height, 4);
  EXPECT_EQ(back.values, im.values);
  // Header is 8 bytes, payload 20 floats.
  EXPECT_EQ(fs::file_size(p), 8u + 20u * 4u);
}

TEST(Image, DepthRejectsCorruptHeader) {
  TempDir tmp;
  fs::path p = tmp.path() / "bad.f32";
  write_text_file(p, "xx");
  EXPECT_THROW(read_depth_f32(p), Error);
}

TEST(Parallel, MatchesSerialExecution) {
  std::vector<int> serial(100), parallel(100);
  set_thread_count(1);
  parallel_for(100, [&](size_t i) { serial[i] = static_cast<int>(i * i); });
  set_thread_count(4);
  parallel_for(100, [&](size_t i) { parallel[i] = static_cast<int>(i * i); });
  set_thread_count(1);
  EXPECT_EQ(serial, parallel);
}

}  // namespace
}  // namespace tracegen
