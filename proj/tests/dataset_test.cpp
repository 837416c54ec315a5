#include "tracegen/dataset.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include "tracegen/rng.hpp"

namespace tracegen {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("tracegen_ds_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
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

TraceSample make_sample() {
  TraceSample s;
  s.observation = Image8::filled(32, 24, 10, 120, 200);
  s.depth = ImageF::filled(32, 24, 1.5f);
  GridSpec grid;
  grid.rows = 4;
  grid.cols = 4;
  grid.image_width = 32;
  grid.image_height = 24;
  s.trace = ScreenTrace::zeros(grid, 3);
  Rng rng(9);
  for (int k = 0; k < s.trace.point_count(); ++k) {
    for (int t = 0; t < s.trace.frame_count(); ++t) {
      s.trace.at(k, t) = Eigen::Vector3d(rng.uniform(0, 32), rng.uniform(0, 24),
                                         rng.uniform(0.5, 2.0));
    }
  }
  s.trace.set_valid(3, 1, false);
  s.trace.set_valid(3, 2, false);
  s.trace.z_valid[5] = 0;
  s.instructions = {"push the block left", "slide the block to the left edge"};
  s.source_id = "unit/sample-0";
  s.camera = look_at({0, -1, 1}, {0, 0, 0}, {0, 0, 1}, 40, 40, 16, 12);
  s.z_scale = 33.25;
  return s;
}

TEST(Rle, RoundTripVariedMasks) {
  std::vector<std::vector<uint8_t>> masks = {
      {}, {1}, {0}, {1, 1, 1}, {0, 0, 1, 1, 0}, {1, 0, 1, 0, 1}};
  for (const auto& mask : masks) {
    nlohmann::json j = rle_encode(mask);
    EXPECT_EQ(rle_decode(j, mask.size()), mask);
  }
}

TEST(Rle, CompactForUniformMask) {
  std::vector<uint8_t> mask(10000, 1);
  nlohmann::json j = rle_encode(mask);
  EXPECT_EQ(j["runs"].size(), 1u);
  EXPECT_EQ(rle_decode(j, mask.size()), mask);
}

TEST(Rle, LengthMismatchThrows) {
  nlohmann::json j = rle_encode({1, 1, 0});
  EXPECT_THROW(rle_decode(j, 4), Error);
}

TEST(Dataset, SampleRoundTrip) {
  TempDir tmp;
  TraceSample s = make_sample();
  write_sample(tmp.path() / "ep0", s);
  TraceSample back = read_sample(tmp.path() / "ep0");

  EXPECT_EQ(back.observation.pixels, s.observation.pixels);
  EXPECT_EQ(back.depth.values, s.depth.values);
  EXPECT_EQ(back.trace.valid, s.trace.valid);
  EXPECT_EQ(back.trace.z_valid, s.trace.z_valid);
  EXPECT_EQ(back.instructions, s.instructions);
  EXPECT_EQ(back.source_id, s.source_id);
  EXPECT_DOUBLE_EQ(back.z_scale, s.z_scale);
  EXPECT_TRUE(back.trace.grid == s.trace.grid);
  // Points pass through float32 storage.
  for (size_t i = 0; i < s.trace.points.size(); ++i) {
    EXPECT_NEAR(back.trace.points[i], s.trace.points[i], 1e-4);
  }
  // Camera stays exact (JSON doubles round-trip).
  EXPECT_TRUE(back.camera == s.camera);
}

TEST(Dataset, WriterIsDeterministic) {
  TempDir tmp;
  TraceSample s = make_sample();
  write_sample(tmp.path() / "a", s);
  write_sample(tmp.path() / "b", s);
  for (const char* name : {"observation.png", "depth.f32", "trace.f32", "meta.json"}) {
    EXPECT_EQ(hash_file(tmp.path() / "a" / name), hash_file(tmp.path() / "b" / name))
        << name;
  }
}

TEST(Dataset, MismatchedDepthRejected) {
  TempDir tmp;
  TraceSample s = make_sample();
  write_sample(tmp.path() / "ep0", s);
  // Corrupt: replace depth with a different-sized map.
  write_depth_f32(tmp.path() / "ep0" / "depth.f32", ImageF::filled(8, 8, 1.0f));
  EXPECT_THROW(read_sample(tmp.path() / "ep0"), Error);
}

TEST(Dataset, TraceShapeDisagreementRejected) {
  TempDir tmp;
  TraceSample s = make_sample();
  write_sample(tmp.path() / "ep0", s);
  ScreenTrace other = ScreenTrace::zeros(s.trace.grid, 5);
  for (auto& v : other.points) v = 1.0;
  write_trace_f32(tmp.path() / "ep0" / "trace.f32", other);
  EXPECT_THROW(read_sample(tmp.path() / "ep0"), Error);
}

TEST(Dataset, MissingFilesRejected) {
  TempDir tmp;
  fs::create_directories(tmp.path() / "empty");
  EXPECT_THROW(read_sample(tmp.path() / "empty"), Error);
}

TEST(Dataset, ProvenanceHasNoTimestampAndStableHashes) {
  TempDir tmp;
  write_text_file(tmp.path() / "input.txt", "payload");
  auto hashes = hash_inputs(tmp.path());
  ASSERT_EQ(hashes.size(), 1u);
  write_provenance(tmp.path() / "provenance.json", "synth",
                   nlohmann::json{{"seed", 42}}, hashes);
  std::string text = read_text_file(tmp.path() / "provenance.json");
  nlohmann::json j = nlohmann::json::parse(text);
  EXPECT_EQ(j["tool_version"], kToolVersion);
  EXPECT_EQ(j["command"], "synth");
  EXPECT_EQ(j["config"]["seed"], 42);
  EXPECT_EQ(j["input_hashes"]["input.txt"], hex64(fnv1a64(std::string("payload"))));
  EXPECT_EQ(text.find("time"), std::string::npos);
  EXPECT_EQ(text.find("date"), std::string::npos);
}

TEST(Dataset, CameraJsonRoundTrip) {
  CameraModel cam = look_at({0.3, -0.9, 0.55}, {0, 0, 0.1}, {0, 0, 1}, 80, 80, 48, 36);
  CameraModel back = camera_from_json(camera_to_json(cam));
  EXPECT_TRUE(back == cam);
}

}  // namespace
}  // namespace tracegen
