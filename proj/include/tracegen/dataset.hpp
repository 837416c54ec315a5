#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tracegen/common.hpp"
#include "tracegen/geometry.hpp"
#include "tracegen/image.hpp"
#include "tracegen/io.hpp"
#include "tracegen/trace.hpp"

namespace tracegen {

inline constexpr uint32_t kMetaFormatVersion = 1;

// One training example: what the policy camera saw at the reference frame,
// plus the trace describing how the scene moved afterwards.
struct TraceSample {
  Image8 observation;
  ImageF depth;
  ScreenTrace trace;
  std::vector<std::string> instructions;  // 1 to 3 paraphrases
  std::string source_id;
  CameraModel camera;  // reference camera used to express the trace
  double z_scale = 1.0;  // pixels-per-meter factor applied to z during retargeting

  void check() const {
    trace.check_shape();
    require(observation.width > 0 && observation.height > 0, ErrorKind::ShapeMismatch,
            "sample has empty observation");
    require(depth.width == observation.width && depth.height == observation.height,
            ErrorKind::ShapeMismatch, "depth dimensions differ from observation");
    require(trace.grid.image_width == observation.width &&
                trace.grid.image_height == observation.height,
            ErrorKind::ShapeMismatch, "trace grid anchored to a different image size");
    require(!instructions.empty() && instructions.size() <= 3, ErrorKind::InvalidArgument,
            "sample needs 1 to 3 instructions");
  }
};

// Run-length encoding of a 0/1 mask: first value, then run lengths of
// alternating values. Keeps meta.json small for mostly-valid masks.
inline nlohmann::json rle_encode(const std::vector<uint8_t>& mask) {
  nlohmann::json out;
  out["first"] = mask.empty() ? 0 : static_cast<int>(mask[0] != 0);
  std::vector<int64_t> runs;
  size_t i = 0;
  while (i < mask.size()) {
    size_t j = i;
    while (j < mask.size() && (mask[j] != 0) == (mask[i] != 0)) ++j;
    runs.push_back(static_cast<int64_t>(j - i));
    i = j;
  }
  out["runs"] = runs;
  return out;
}

inline std::vector<uint8_t> rle_decode(const nlohmann::json& j, size_t expected_size) {
  require(j.contains("first") && j.contains("runs"), ErrorKind::IoError,
          "malformed RLE block");
  uint8_t value = j["first"].get<int>() != 0 ? 1 : 0;
  std::vector<uint8_t> out;
  for (const auto& run : j["runs"]) {
    int64_t len = run.get<int64_t>();
    require(len > 0, ErrorKind::IoError, "RLE run length must be positive");
    out.insert(out.end(), static_cast<size_t>(len), value);
    value = value ? 0 : 1;
  }
  require(out.size() == expected_size, ErrorKind::IoError,
          "RLE mask length does not match expected size");
  return out;
}

inline nlohmann::json camera_to_json(const CameraModel& cam) {
  nlohmann::json j;
  j["fx"] = cam.fx;
  j["fy"] = cam.fy;
  j["cx"] = cam.cx;
  j["cy"] = cam.cy;
  std::vector<double> rot(9);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot[static_cast<size_t>(r) * 3 + c] = cam.rotation(r, c);
  j["rotation"] = rot;
  j["translation"] = {cam.translation.x(), cam.translation.y(), cam.translation.z()};
  return j;
}

inline CameraModel camera_from_json(const nlohmann::json& j) {
  CameraModel cam;
  cam.fx = j.at("fx").get<double>();
  cam.fy = j.at("fy").get<double>();
  cam.cx = j.at("cx").get<double>();
  cam.cy = j.at("cy").get<double>();
  const auto& rot = j.at("rotation");
  require(rot.size() == 9, ErrorKind::IoError, "camera rotation must have 9 entries");
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) cam.rotation(r, c) = rot[static_cast<size_t>(r) * 3 + c];
  const auto& t = j.at("translation");
  require(t.size() == 3, ErrorKind::IoError, "camera translation must have 3 entries");
  for (int i = 0; i < 3; ++i) cam.translation[i] = t[static_cast<size_t>(i)];
  return cam;
}

// trace.f32: u32 point_count, u32 frame_count, then point-major
// (x, y, z) float32 triples, little-endian.
inline void write_trace_f32(const std::filesystem::path& path, const ScreenTrace& trace) {
  trace.check_shape();
  std::ofstream os = open_output(path);
  write_u32le(os, static_cast<uint32_t>(trace.point_count()));
  write_u32le(os, static_cast<uint32_t>(trace.frame_count()));
  std::vector<float> buf(trace.points.size());
  for (size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(trace.points[i]);
  write_f32le(os, buf.data(), buf.size());
  require(os.good(), ErrorKind::IoError, "short write: " + path.string());
}

// Reads the payload of a trace file. Grid geometry and validity live in
// meta.json; this returns points plus the (K, frames) header.
struct TraceFilePayload {
  uint32_t point_count = 0;
  uint32_t frame_count = 0;
  std::vector<double> points;
};

inline TraceFilePayload read_trace_f32(const std::filesystem::path& path) {
  std::ifstream is = open_input(path);
  TraceFilePayload payload;
  payload.point_count = read_u32le(is);
  payload.frame_count = read_u32le(is);
  require(payload.point_count > 0 && payload.frame_count >= 2, ErrorKind::IoError,
          "trace file needs at least one point and two frames: " + path.string());
  size_t n = static_cast<size_t>(payload.point_count) * payload.frame_count * 3;
  std::vector<float> buf(n);
  read_f32le(is, buf.data(), n);
  payload.points.assign(buf.begin(), buf.end());
  return payload;
}

inline void write_sample(const std::filesystem::path& dir, const TraceSample& sample) {
  sample.check();
  std::filesystem::create_directories(dir);
  write_png(dir / "observation.png", sample.observation);
  write_depth_f32(dir / "depth.f32", sample.depth);
  write_trace_f32(dir / "trace.f32", sample.trace);

  nlohmann::json meta;
  meta["format_version"] = kMetaFormatVersion;
  meta["grid"] = {{"rows", sample.trace.grid.rows},
                  {"cols", sample.trace.grid.cols},
                  {"image_width", sample.trace.grid.image_width},
                  {"image_height", sample.trace.grid.image_height}};
  meta["horizon"] = sample.trace.horizon;
  meta["camera"] = camera_to_json(sample.camera);
  meta["instructions"] = sample.instructions;
  meta["source_id"] = sample.source_id;
  meta["z_scale"] = sample.z_scale;
  meta["valid_rle"] = rle_encode(sample.trace.valid);
  meta["z_valid_rle"] = rle_encode(sample.trace.z_valid);
  write_text_file(dir / "meta.json", meta.dump(2) + "\n");
}

inline TraceSample read_sample(const std::filesystem::path& dir) {
  TraceSample sample;
  sample.observation = read_png(dir / "observation.png");
  sample.depth = read_depth_f32(dir / "depth.f32");

  nlohmann::json meta = nlohmann::json::parse(read_text_file(dir / "meta.json"));
  require(meta.at("format_version").get<uint32_t>() == kMetaFormatVersion,
          ErrorKind::IoError, "unsupported meta format version in " + dir.string());
  GridSpec grid;
  grid.rows = meta.at("grid").at("rows").get<int>();
  grid.cols = meta.at("grid").at("cols").get<int>();
  grid.image_width = meta.at("grid").at("image_width").get<int>();
  grid.image_height = meta.at("grid").at("image_height").get<int>();

  TraceFilePayload payload = read_trace_f32(dir / "trace.f32");
  int horizon = meta.at("horizon").get<int>();
  require(payload.point_count == static_cast<uint32_t>(grid.point_count()) &&
              payload.frame_count == static_cast<uint32_t>(horizon + 1),
          ErrorKind::ShapeMismatch, "trace file shape disagrees with meta.json");

  sample.trace.grid = grid;
  sample.trace.horizon = horizon;
  sample.trace.points = std::move(payload.points);
  size_t n = static_cast<size_t>(grid.point_count());
  sample.trace.valid = rle_decode(meta.at("valid_rle"), n * (horizon + 1));
  sample.trace.z_valid = rle_decode(meta.at("z_valid_rle"), n);

  sample.camera = camera_from_json(meta.at("camera"));
  sample.instructions = meta.at("instructions").get<std::vector<std::string>>();
  sample.source_id = meta.at("source_id").get<std::string>();
  sample.z_scale = meta.at("z_scale").get<double>();
  sample.check();
  return sample;
}

// Every artifact-producing command drops a provenance.json describing how the
// artifact was made. Deliberately no timestamps: identical runs must produce
// identical bytes.
inline void write_provenance(const std::filesystem::path& path, const std::string& command,
                             const nlohmann::json& resolved_config,
                             const std::map<std::string, std::string>& input_hashes) {
  nlohmann::json j;
  j["tool_version"] = kToolVersion;
  j["command"] = command;
  j["config"] = resolved_config;
  j["input_hashes"] = input_hashes;
  write_text_file(path, j.dump(2) + "\n");
}

// Hashes every regular file under `dir` (recursive, sorted relative paths).
inline std::map<std::string, std::string> hash_inputs(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  if (std::filesystem::is_regular_file(dir)) {
    out[dir.filename().string()] = hex64(hash_file(dir));
    return out;
  }
  require(std::filesystem::is_directory(dir), ErrorKind::IoError,
          "input path does not exist: " + dir.string());
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string rel = std::filesystem::relative(entry.path(), dir).generic_string();
    out[rel] = hex64(hash_file(entry.path()));
  }
  return out;
}

}  // namespace tracegen
