#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tracegen/common.hpp"
#include "tracegen/dataset.hpp"
#include "tracegen/geometry.hpp"
#include "tracegen/image.hpp"
#include "tracegen/io.hpp"
#include "tracegen/log.hpp"
#include "tracegen/trace.hpp"

namespace tracegen {

// Raw tracking output for one episode: world-frame 3D point tracks observed
// by a (possibly moving) calibrated camera. `has_depth` marks tracks whose
// depth is metrically trustworthy; the rest are treated as 2D-only.
struct RawTrackSet {
  int track_count = 0;
  int frame_count = 0;
  double fps = 30.0;
  std::vector<double> world_points;       // track-major: [k][t][xyz]
  std::vector<uint8_t> valid;             // track-major: [k][t]
  std::vector<uint8_t> has_depth;         // per track
  std::vector<CameraModel> cameras;       // one per frame, shared intrinsics

  size_t index(int k, int t) const {
    return (static_cast<size_t>(k) * frame_count + t) * 3;
  }
  Eigen::Map<Eigen::Vector3d> at(int k, int t) {
    return Eigen::Map<Eigen::Vector3d>(world_points.data() + index(k, t));
  }
  Eigen::Map<const Eigen::Vector3d> at(int k, int t) const {
    return Eigen::Map<const Eigen::Vector3d>(world_points.data() + index(k, t));
  }
  bool is_valid(int k, int t) const {
    return valid[static_cast<size_t>(k) * frame_count + t] != 0;
  }

  void check() const {
    require(track_count >= 1, ErrorKind::ShapeMismatch, "track set has no tracks");
    require(frame_count >= 2, ErrorKind::ShapeMismatch, "track set needs >= 2 frames");
    size_t n = static_cast<size_t>(track_count);
    require(world_points.size() == n * frame_count * 3, ErrorKind::ShapeMismatch,
            "world point buffer size mismatch");
    require(valid.size() == n * frame_count, ErrorKind::ShapeMismatch,
            "track validity buffer size mismatch");
    require(has_depth.size() == n, ErrorKind::ShapeMismatch,
            "has_depth buffer size mismatch");
    require(cameras.size() == static_cast<size_t>(frame_count), ErrorKind::ShapeMismatch,
            "need one camera pose per frame");
    for (const auto& cam : cameras) cam.validate(1e-6);
  }
};

// A contiguous run of frames with sustained scene motion.
struct EventChunk {
  int start_frame = 0;
  int end_frame = 0;  // exclusive
  double motion_score = 0.0;  // mean per-frame displacement inside the chunk, px

  int length() const { return end_frame - start_frame; }
};

// Per-frame scene-motion score: mean 2D displacement (px) of world points
// between consecutive frames, both projected through the *same* camera (the
// later frame's), so pure camera motion scores zero. Frame 0 inherits the
// score of frame 1.
inline std::vector<double> motion_scores(const RawTrackSet& tracks) {
  tracks.check();
  std::vector<double> score(static_cast<size_t>(tracks.frame_count), 0.0);
  for (int f = 1; f < tracks.frame_count; ++f) {
    const CameraModel& cam = tracks.cameras[static_cast<size_t>(f)];
    double sum = 0.0;
    int count = 0;
    for (int k = 0; k < tracks.track_count; ++k) {
      if (!tracks.is_valid(k, f) || !tracks.is_valid(k, f - 1)) continue;
      Eigen::Vector3d a_cam = cam.world_to_camera(tracks.at(k, f - 1));
      Eigen::Vector3d b_cam = cam.world_to_camera(tracks.at(k, f));
      if (a_cam.z() <= kMinDepth || b_cam.z() <= kMinDepth) continue;
      Eigen::Vector3d a = project_camera_to_screen(a_cam, cam);
      Eigen::Vector3d b = project_camera_to_screen(b_cam, cam);
      sum += std::hypot(b.x() - a.x(), b.y() - a.y());
      ++count;
    }
    score[static_cast<size_t>(f)] = count > 0 ? sum / count : 0.0;
  }
  if (tracks.frame_count > 1) score[0] = score[1];
  return score;
}

inline std::vector<EventChunk> chunk_events(const RawTrackSet& tracks,
                                            double motion_threshold = 0.5,
                                            int min_chunk_len = 8) {
  require(motion_threshold >= 0.0, ErrorKind::InvalidArgument,
          "motion threshold must be non-negative");
  require(min_chunk_len >= 2, ErrorKind::InvalidArgument, "min chunk length must be >= 2");
  std::vector<double> score = motion_scores(tracks);

  std::vector<EventChunk> chunks;
  int run_start = -1;
  for (int f = 0; f <= tracks.frame_count; ++f) {
    bool moving = f < tracks.frame_count && score[static_cast<size_t>(f)] >= motion_threshold;
    if (moving && run_start < 0) run_start = f;
    if (!moving && run_start >= 0) {
      if (f - run_start >= min_chunk_len) {
        EventChunk chunk;
        chunk.start_frame = run_start;
        chunk.end_frame = f;
        double sum = 0.0;
        for (int g = run_start; g < f; ++g) sum += score[static_cast<size_t>(g)];
        chunk.motion_score = sum / chunk.length();
        chunks.push_back(chunk);
      }
      run_start = -1;
    }
  }
  require(!chunks.empty(), ErrorKind::NoMotionFound,
          "no motion chunk of length >= " + std::to_string(min_chunk_len));
  return chunks;
}

// align_to_reference output plus the cell-to-track assignment (needed by
// evaluation to map ground-truth track labels onto grid keypoints).
struct AlignResult {
  ScreenTrace trace;
  std::vector<int> cell_track;  // track index seeded at each grid cell, -1 if none
};

// Expresses a chunk as a screen-aligned trace in the chunk's first camera.
// Every frame of every track is projected through that single reference
// camera, which cancels camera ego-motion. Each grid cell is seeded with the
// nearest track (by reference-frame projection, ties to the lowest track
// index) and the track's screen path is rebased so the cell's first (x, y)
// sits exactly on the grid position; z is kept as projected.
inline AlignResult align_to_reference_ex(const RawTrackSet& tracks, const EventChunk& chunk,
                                         const GridSpec& grid) {
  tracks.check();
  grid.validate();
  require(chunk.start_frame >= 0 && chunk.end_frame <= tracks.frame_count &&
              chunk.length() >= 2,
          ErrorKind::InvalidArgument, "chunk does not fit inside the track set");

  int ref = chunk.start_frame;
  const CameraModel& cam = tracks.cameras[static_cast<size_t>(ref)];
  int frames = chunk.length();

  // Screen paths of all tracks through the reference camera.
  std::vector<double> screen(static_cast<size_t>(tracks.track_count) * frames * 3, 0.0);
  std::vector<uint8_t> vis(static_cast<size_t>(tracks.track_count) * frames, 0);
  std::vector<uint8_t> seedable(static_cast<size_t>(tracks.track_count), 0);
  for (int k = 0; k < tracks.track_count; ++k) {
    for (int f = 0; f < frames; ++f) {
      int t = chunk.start_frame + f;
      if (!tracks.is_valid(k, t)) continue;
      Eigen::Vector3d p_cam = cam.world_to_camera(tracks.at(k, t));
      if (p_cam.z() <= kMinDepth) continue;
      Eigen::Vector3d s = project_camera_to_screen(p_cam, cam);
      size_t base = (static_cast<size_t>(k) * frames + f) * 3;
      screen[base] = s.x();
      screen[base + 1] = s.y();
      screen[base + 2] = s.z();
      vis[static_cast<size_t>(k) * frames + f] = 1;
    }
    seedable[static_cast<size_t>(k)] = vis[static_cast<size_t>(k) * frames] ? 1 : 0;
  }

  AlignResult result;
  result.trace = ScreenTrace::zeros(grid, frames - 1);
  result.cell_track.assign(static_cast<size_t>(grid.point_count()), -1);

  bool any_seedable = std::any_of(seedable.begin(), seedable.end(),
                                  [](uint8_t v) { return v != 0; });
  require(any_seedable, ErrorKind::NoValidOverlap,
          "no track is visible at the reference frame");

  for (int cell = 0; cell < grid.point_count(); ++cell) {
    Eigen::Vector2d gp = grid.position(cell);
    int best = -1;
    double best_dist = 0.0;
    for (int k = 0; k < tracks.track_count; ++k) {
      if (!seedable[static_cast<size_t>(k)]) continue;
      size_t base = static_cast<size_t>(k) * frames * 3;
      double d = std::hypot(screen[base] - gp.x(), screen[base + 1] - gp.y());
      if (best < 0 || d < best_dist) {
        best = k;
        best_dist = d;
      }
    }
    result.cell_track[static_cast<size_t>(cell)] = best;

    size_t ref_base = static_cast<size_t>(best) * frames * 3;
    double off_x = gp.x() - screen[ref_base];
    double off_y = gp.y() - screen[ref_base + 1];
    Eigen::Vector3d last(gp.x(), gp.y(), screen[ref_base + 2]);
    for (int f = 0; f < frames; ++f) {
      bool ok = vis[static_cast<size_t>(best) * frames + f] != 0;
      if (ok) {
        size_t base = (static_cast<size_t>(best) * frames + f) * 3;
        last = Eigen::Vector3d(screen[base] + off_x, screen[base + 1] + off_y,
                               screen[base + 2]);
      }
      // Untracked frames hold the last known position (zero increment).
      result.trace.at(cell, f) = last;
      result.trace.set_valid(cell, f, ok);
    }
    result.trace.z_valid[static_cast<size_t>(cell)] =
        tracks.has_depth[static_cast<size_t>(best)];
  }
  return result;
}

inline ScreenTrace align_to_reference(const RawTrackSet& tracks, const EventChunk& chunk,
                                      const GridSpec& grid) {
  return align_to_reference_ex(tracks, chunk, grid).trace;
}

// Default pixel-equivalent scale for the z channel: fx over the median valid
// depth, so one meter of depth change counts like one meter of lateral motion
// at the scene's typical distance. Falls back to 1 when no depth is trusted.
inline double default_z_scale(const ScreenTrace& trace, double fx) {
  std::vector<double> depths;
  for (int k = 0; k < trace.point_count(); ++k) {
    if (!trace.z_valid[static_cast<size_t>(k)]) continue;
    for (int t = 0; t < trace.frame_count(); ++t) {
      if (trace.is_valid(k, t) && trace.at(k, t).z() > kMinDepth) {
        depths.push_back(trace.at(k, t).z());
      }
    }
  }
  if (depths.empty()) return 1.0;
  size_t mid = depths.size() / 2;
  std::nth_element(depths.begin(), depths.begin() + static_cast<ptrdiff_t>(mid), depths.end());
  return fx / depths[mid];
}

namespace detail {

// Cumulative scene arc length at every input frame: mean over keypoints of
// the per-increment screen displacement, with z weighted into pixel units.
inline std::vector<double> cumulative_arc(const ScreenTrace& trace, double z_scale) {
  std::vector<double> cum(static_cast<size_t>(trace.frame_count()), 0.0);
  for (int t = 0; t < trace.horizon; ++t) {
    double sum = 0.0;
    int count = 0;
    for (int k = 0; k < trace.point_count(); ++k) {
      if (!trace.is_valid(k, t) || !trace.is_valid(k, t + 1)) continue;
      Eigen::Vector3d d = trace.at(k, t + 1) - trace.at(k, t);
      double dz = trace.z_valid[static_cast<size_t>(k)] ? d.z() * z_scale : 0.0;
      sum += std::sqrt(d.x() * d.x() + d.y() * d.y() + dz * dz);
      ++count;
    }
    cum[static_cast<size_t>(t) + 1] =
        cum[static_cast<size_t>(t)] + (count > 0 ? sum / count : 0.0);
  }
  return cum;
}

// Smallest u with C(u) = target on a piecewise-linear non-decreasing C.
inline double invert_cumulative(const std::vector<double>& cum, double target) {
  size_t last = cum.size() - 1;
  for (size_t j = 0; j < last; ++j) {
    if (cum[j + 1] >= target) {
      double seg = cum[j + 1] - cum[j];
      if (seg <= 0.0) return static_cast<double>(j);
      double f = (target - cum[j]) / seg;
      return static_cast<double>(j) + std::min(std::max(f, 0.0), 1.0);
    }
  }
  return static_cast<double>(last);
}

}  // namespace detail

// Retimes a trace so arc length progresses uniformly across `target_len`
// output increments. All keypoints are resampled on one shared time warp (the
// scene is retimed as a whole, not per point). First and last frames are
// preserved exactly. A chunk with no net motion degrades to uniform time
// resampling instead of failing.
inline ScreenTrace retarget_speed(const ScreenTrace& trace, int target_len, double z_scale) {
  trace.check_shape();
  require(target_len >= 1, ErrorKind::InvalidArgument, "target length must be >= 1");
  require(z_scale > 0.0, ErrorKind::InvalidArgument, "z scale must be positive");

  std::vector<double> cum = detail::cumulative_arc(trace, z_scale);
  double total = cum.back();
  int in_last = trace.horizon;  // last input frame index

  std::vector<double> warp(static_cast<size_t>(target_len) + 1);
  warp[0] = 0.0;
  warp[static_cast<size_t>(target_len)] = static_cast<double>(in_last);
  for (int i = 1; i < target_len; ++i) {
    double u;
    if (total <= 1e-12) {
      u = static_cast<double>(i) * in_last / target_len;  // degenerate: uniform in time
    } else {
      u = detail::invert_cumulative(cum, total * i / target_len);
    }
    warp[static_cast<size_t>(i)] = u;
  }

  ScreenTrace out = ScreenTrace::zeros(trace.grid, target_len);
  out.z_valid = trace.z_valid;
  for (int k = 0; k < trace.point_count(); ++k) {
    for (int i = 0; i <= target_len; ++i) {
      double u = warp[static_cast<size_t>(i)];
      int j = static_cast<int>(std::floor(u));
      if (j >= in_last) j = in_last - 1;
      double f = u - j;
      Eigen::Vector3d a = trace.at(k, j);
      Eigen::Vector3d b = trace.at(k, j + 1);
      out.at(k, i) = (1.0 - f) * a + f * b;
      bool ok = f <= 0.0 ? trace.is_valid(k, j)
                : (f >= 1.0 ? trace.is_valid(k, j + 1)
                            : trace.is_valid(k, j) && trace.is_valid(k, j + 1));
      out.set_valid(k, i, ok);
    }
  }
  return out;
}

// Multiplicative correction aligning one depth map onto another. `ratio`
// holds sensor/predicted smoothed over valid overlap; 1.0 where no valid
// evidence reaches.
struct DepthRescaleMap {
  int width = 0;
  int height = 0;
  std::vector<double> ratio;

  double at(int x, int y) const { return ratio[static_cast<size_t>(y) * width + x]; }
};

// Builds the rescale map. Valid overlap pixels contribute sensor/predicted;
// the field is smoothed with a 3-sigma-truncated Gaussian whose weights are
// renormalized over the valid support (invalid pixels contribute nothing
// instead of dragging the ratio toward a fill value). Implemented as two
// separable passes of numerator (weight * ratio) and denominator (weight),
// which is exact because the truncated 2D kernel is a product kernel.
inline DepthRescaleMap rescale_depth(const ImageF& predicted, const ImageF& sensor,
                                     double blur_sigma = 7.0) {
  require(predicted.width == sensor.width && predicted.height == sensor.height,
          ErrorKind::ShapeMismatch, "depth map dimensions differ");
  require(predicted.width > 0 && predicted.height > 0, ErrorKind::ShapeMismatch,
          "depth maps are empty");
  require(blur_sigma >= 0.0, ErrorKind::InvalidArgument, "blur sigma must be >= 0");

  int w = predicted.width;
  int h = predicted.height;
  size_t n = static_cast<size_t>(w) * h;
  std::vector<double> raw(n, 0.0);
  std::vector<double> mask(n, 0.0);
  size_t overlap = 0;
  for (size_t i = 0; i < n; ++i) {
    float p = predicted.values[i];
    float s = sensor.values[i];
    if (p > 0.0f && s > 0.0f) {
      raw[i] = static_cast<double>(s) / static_cast<double>(p);
      mask[i] = 1.0;
      ++overlap;
    }
  }
  require(overlap > 0, ErrorKind::NoValidOverlap,
          "no pixel has both predicted and sensor depth");

  DepthRescaleMap map;
  map.width = w;
  map.height = h;
  map.ratio.assign(n, 1.0);

  int radius = static_cast<int>(std::ceil(3.0 * blur_sigma));
  if (radius == 0) {
    for (size_t i = 0; i < n; ++i) {
      if (mask[i] > 0.0) map.ratio[i] = raw[i];
    }
    return map;
  }

  std::vector<double> kernel(static_cast<size_t>(2 * radius) + 1);
  for (int i = -radius; i <= radius; ++i) {
    kernel[static_cast<size_t>(i + radius)] =
        std::exp(-0.5 * (static_cast<double>(i) * i) / (blur_sigma * blur_sigma));
  }

  // Horizontal pass over (mask * raw) and mask.
  std::vector<double> num_h(n, 0.0), den_h(n, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double num = 0.0, den = 0.0;
      int lo = std::max(0, x - radius);
      int hi = std::min(w - 1, x + radius);
      for (int u = lo; u <= hi; ++u) {
        size_t src = static_cast<size_t>(y) * w + u;
        double kw = kernel[static_cast<size_t>(u - x + radius)];
        num += kw * mask[src] * raw[src];
        den += kw * mask[src];
      }
      size_t dst = static_cast<size_t>(y) * w + x;
      num_h[dst] = num;
      den_h[dst] = den;
    }
  }
  // Vertical pass.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double num = 0.0, den = 0.0;
      int lo = std::max(0, y - radius);
      int hi = std::min(h - 1, y + radius);
      for (int v = lo; v <= hi; ++v) {
        double kw = kernel[static_cast<size_t>(v - y + radius)];
        num += kw * num_h[static_cast<size_t>(v) * w + x];
        den += kw * den_h[static_cast<size_t>(v) * w + x];
      }
      if (den > 0.0) map.ratio[static_cast<size_t>(y) * w + x] = num / den;
    }
  }
  return map;
}

struct ApplyRescaleResult {
  ScreenTrace trace;
  std::vector<uint8_t> out_of_bounds;  // per (keypoint, frame), map lookup failed
};

// Multiplies each point's z by the rescale ratio at its rounded pixel
// location. Points falling outside the map keep their z and are flagged.
inline ApplyRescaleResult apply_depth_rescale(const ScreenTrace& trace,
                                              const DepthRescaleMap& map) {
  trace.check_shape();
  require(map.width > 0 && map.height > 0 &&
              map.ratio.size() == static_cast<size_t>(map.width) * map.height,
          ErrorKind::ShapeMismatch, "rescale map is malformed");
  ApplyRescaleResult result;
  result.trace = trace;
  result.out_of_bounds.assign(
      static_cast<size_t>(trace.point_count()) * trace.frame_count(), 0);
  for (int k = 0; k < trace.point_count(); ++k) {
    if (!trace.z_valid[static_cast<size_t>(k)]) continue;
    for (int t = 0; t < trace.frame_count(); ++t) {
      Eigen::Map<Eigen::Vector3d> p = result.trace.at(k, t);
      int x = static_cast<int>(std::lround(p.x()));
      int y = static_cast<int>(std::lround(p.y()));
      if (x < 0 || x >= map.width || y < 0 || y >= map.height) {
        result.out_of_bounds[static_cast<size_t>(k) * trace.frame_count() + t] = 1;
        continue;
      }
      p.z() *= map.at(x, y);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Episode input format (one directory per episode):
//   tracks.f32         u32 frame_count, u32 track_count, then frame-major
//                      float32 world xyz, then track-major u8 validity
//                      [k][t], then u8 has_depth per track
//   poses.json         fps, shared intrinsics, per-frame rotation+translation
//   frames/frame_NNNN.png   RGB observation per frame
//   depth/depth_NNNN.f32    sensor depth per frame
//   instructions.json  {"instructions": ["...", up to 3]}
// ---------------------------------------------------------------------------

struct ForgeEpisode {
  std::string id;
  RawTrackSet tracks;
  std::filesystem::path dir;
  std::vector<std::string> instructions;

  Image8 frame(int t) const {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%04d.png", t);
    return read_png(dir / "frames" / name);
  }
  ImageF depth(int t) const {
    char name[32];
    std::snprintf(name, sizeof(name), "depth_%04d.f32", t);
    return read_depth_f32(dir / "depth" / name);
  }
};

inline void write_tracks_f32(const std::filesystem::path& path, const RawTrackSet& tracks) {
  tracks.check();
  std::ofstream os = open_output(path);
  write_u32le(os, static_cast<uint32_t>(tracks.frame_count));
  write_u32le(os, static_cast<uint32_t>(tracks.track_count));
  std::vector<float> buf(static_cast<size_t>(tracks.frame_count) * tracks.track_count * 3);
  size_t w = 0;
  for (int t = 0; t < tracks.frame_count; ++t) {
    for (int k = 0; k < tracks.track_count; ++k) {
      Eigen::Vector3d p = tracks.at(k, t);
      buf[w++] = static_cast<float>(p.x());
      buf[w++] = static_cast<float>(p.y());
      buf[w++] = static_cast<float>(p.z());
    }
  }
  write_f32le(os, buf.data(), buf.size());
  os.write(reinterpret_cast<const char*>(tracks.valid.data()),
           static_cast<std::streamsize>(tracks.valid.size()));
  os.write(reinterpret_cast<const char*>(tracks.has_depth.data()),
           static_cast<std::streamsize>(tracks.has_depth.size()));
  require(os.good(), ErrorKind::IoError, "short write: " + path.string());
}

inline RawTrackSet read_tracks_f32(const std::filesystem::path& path) {
  std::ifstream is = open_input(path);
  RawTrackSet tracks;
  tracks.frame_count = static_cast<int>(read_u32le(is));
  tracks.track_count = static_cast<int>(read_u32le(is));
  require(tracks.frame_count >= 2 && tracks.track_count >= 1 &&
              tracks.frame_count < (1 << 20) && tracks.track_count < (1 << 20),
          ErrorKind::IoError, "implausible track header in " + path.string());
  size_t n = static_cast<size_t>(tracks.frame_count) * tracks.track_count;
  std::vector<float> buf(n * 3);
  read_f32le(is, buf.data(), buf.size());
  tracks.world_points.resize(n * 3);
  size_t r = 0;
  for (int t = 0; t < tracks.frame_count; ++t) {
    for (int k = 0; k < tracks.track_count; ++k) {
      size_t base = tracks.index(k, t);
      tracks.world_points[base] = buf[r++];
      tracks.world_points[base + 1] = buf[r++];
      tracks.world_points[base + 2] = buf[r++];
    }
  }
  tracks.valid.resize(n);
  is.read(reinterpret_cast<char*>(tracks.valid.data()), static_cast<std::streamsize>(n));
  tracks.has_depth.resize(static_cast<size_t>(tracks.track_count));
  is.read(reinterpret_cast<char*>(tracks.has_depth.data()),
          static_cast<std::streamsize>(tracks.track_count));
  require(is.good(), ErrorKind::IoError, "truncated track file: " + path.string());
  return tracks;
}

inline void write_poses_json(const std::filesystem::path& path, const RawTrackSet& tracks) {
  nlohmann::json j;
  j["fps"] = tracks.fps;
  require(!tracks.cameras.empty(), ErrorKind::ShapeMismatch, "no cameras to write");
  j["intrinsics"] = {{"fx", tracks.cameras[0].fx},
                     {"fy", tracks.cameras[0].fy},
                     {"cx", tracks.cameras[0].cx},
                     {"cy", tracks.cameras[0].cy}};
  nlohmann::json frames = nlohmann::json::array();
  for (const auto& cam : tracks.cameras) {
    nlohmann::json f;
    std::vector<double> rot(9);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) rot[static_cast<size_t>(r) * 3 + c] = cam.rotation(r, c);
    f["rotation"] = rot;
    f["translation"] = {cam.translation.x(), cam.translation.y(), cam.translation.z()};
    frames.push_back(f);
  }
  j["frames"] = frames;
  write_text_file(path, j.dump(2) + "\n");
}

inline void read_poses_json(const std::filesystem::path& path, RawTrackSet& tracks) {
  nlohmann::json j = nlohmann::json::parse(read_text_file(path));
  tracks.fps = j.at("fps").get<double>();
  require(tracks.fps > 0.0, ErrorKind::IoError, "fps must be positive");
  const auto& intr = j.at("intrinsics");
  const auto& frames = j.at("frames");
  tracks.cameras.clear();
  for (const auto& f : frames) {
    CameraModel cam;
    cam.fx = intr.at("fx").get<double>();
    cam.fy = intr.at("fy").get<double>();
    cam.cx = intr.at("cx").get<double>();
    cam.cy = intr.at("cy").get<double>();
    const auto& rot = f.at("rotation");
    require(rot.size() == 9, ErrorKind::IoError, "pose rotation must have 9 entries");
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) cam.rotation(r, c) = rot[static_cast<size_t>(r) * 3 + c];
    const auto& t = f.at("translation");
    require(t.size() == 3, ErrorKind::IoError, "pose translation must have 3 entries");
    for (int i = 0; i < 3; ++i) cam.translation[i] = t[static_cast<size_t>(i)];
    tracks.cameras.push_back(cam);
  }
}

inline ForgeEpisode load_forge_episode(const std::filesystem::path& dir) {
  ForgeEpisode ep;
  ep.dir = dir;
  ep.id = dir.filename().string();
  ep.tracks = read_tracks_f32(dir / "tracks.f32");
  read_poses_json(dir / "poses.json", ep.tracks);
  ep.tracks.check();
  nlohmann::json j = nlohmann::json::parse(read_text_file(dir / "instructions.json"));
  ep.instructions = j.at("instructions").get<std::vector<std::string>>();
  require(!ep.instructions.empty() && ep.instructions.size() <= 3, ErrorKind::IoError,
          "episode needs 1 to 3 instructions");
  return ep;
}

struct ForgeConfig {
  int grid_rows = 20;
  int grid_cols = 20;
  int horizon = 32;
  double motion_threshold = 0.5;  // px per frame
  int min_chunk_len = 8;
  double blur_sigma = 7.0;
  double z_scale = 0.0;  // <= 0 selects fx / median depth per chunk

  nlohmann::json to_json() const {
    return {{"grid_rows", grid_rows},       {"grid_cols", grid_cols},
            {"horizon", horizon},           {"motion_threshold", motion_threshold},
            {"min_chunk_len", min_chunk_len}, {"blur_sigma", blur_sigma},
            {"z_scale", z_scale}};
  }
};

// Sparse "sensor seen through the tracks" depth map: each track visible at
// the reference frame splats its camera depth at its rounded pixel. Used as
// the `predicted` side of the rescale (the traces carry this geometry), with
// the episode's depth map as `sensor`.
inline ImageF splat_track_depth(const RawTrackSet& tracks, int ref, int width, int height) {
  ImageF out = ImageF::filled(width, height, 0.0f);
  const CameraModel& cam = tracks.cameras[static_cast<size_t>(ref)];
  for (int k = 0; k < tracks.track_count; ++k) {
    if (!tracks.is_valid(k, ref) || !tracks.has_depth[static_cast<size_t>(k)]) continue;
    Eigen::Vector3d p_cam = cam.world_to_camera(tracks.at(k, ref));
    if (p_cam.z() <= kMinDepth) continue;
    Eigen::Vector3d s = project_camera_to_screen(p_cam, cam);
    int x = static_cast<int>(std::lround(s.x()));
    int y = static_cast<int>(std::lround(s.y()));
    if (x < 0 || x >= width || y < 0 || y >= height) continue;
    out.at(x, y) = static_cast<float>(s.z());
  }
  return out;
}

// Full per-episode composition: chunk, align, retarget, depth-rescale, pack.
// One TraceSample per detected chunk.
inline std::vector<TraceSample> assemble_triplets(const ForgeEpisode& ep,
                                                  const ForgeConfig& config) {
  std::vector<EventChunk> chunks =
      chunk_events(ep.tracks, config.motion_threshold, config.min_chunk_len);

  std::vector<TraceSample> samples;
  for (size_t ci = 0; ci < chunks.size(); ++ci) {
    const EventChunk& chunk = chunks[ci];
    Image8 observation = ep.frame(chunk.start_frame);
    ImageF sensor_depth = ep.depth(chunk.start_frame);
    require(sensor_depth.width == observation.width &&
                sensor_depth.height == observation.height,
            ErrorKind::ShapeMismatch, "episode depth and frame dimensions differ");

    GridSpec grid;
    grid.rows = config.grid_rows;
    grid.cols = config.grid_cols;
    grid.image_width = observation.width;
    grid.image_height = observation.height;

    ScreenTrace aligned = align_to_reference(ep.tracks, chunk, grid);

    const CameraModel& cam = ep.tracks.cameras[static_cast<size_t>(chunk.start_frame)];
    double z_scale = config.z_scale > 0.0 ? config.z_scale
                                          : default_z_scale(aligned, cam.fx);
    ScreenTrace retargeted = retarget_speed(aligned, config.horizon, z_scale);

    ImageF predicted = splat_track_depth(ep.tracks, chunk.start_frame,
                                         observation.width, observation.height);
    ScreenTrace final_trace = retargeted;
    try {
      DepthRescaleMap map = rescale_depth(predicted, sensor_depth, config.blur_sigma);
      final_trace = apply_depth_rescale(retargeted, map).trace;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoValidOverlap) throw;
      log_warn("depth_rescale_skipped", {{"episode", ep.id}, {"chunk", ci}});
    }

    TraceSample sample;
    sample.observation = std::move(observation);
    sample.depth = std::move(sensor_depth);
    sample.trace = std::move(final_trace);
    sample.instructions = ep.instructions;
    sample.source_id = ep.id + "/chunk_" + std::to_string(ci);
    sample.camera = cam;
    sample.z_scale = z_scale;
    sample.check();
    samples.push_back(std::move(sample));
  }
  return samples;
}

// CLI driver: every subdirectory of `input_dir` holding a tracks.f32 is an
// episode. Episodes without qualifying motion are skipped with a warning.
inline int forge_directory(const std::filesystem::path& input_dir,
                           const std::filesystem::path& output_dir,
                           const ForgeConfig& config) {
  std::filesystem::create_directories(output_dir);
  int written = 0;
  for (const auto& entry : list_dir_sorted(input_dir)) {
    if (!std::filesystem::is_directory(entry) ||
        !std::filesystem::exists(entry / "tracks.f32")) {
      continue;
    }
    ForgeEpisode ep = load_forge_episode(entry);
    std::vector<TraceSample> samples;
    try {
      samples = assemble_triplets(ep, config);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoMotionFound) throw;
      log_warn("episode_skipped_no_motion", {{"episode", ep.id}});
      continue;
    }
    for (size_t i = 0; i < samples.size(); ++i) {
      char suffix[32];
      std::snprintf(suffix, sizeof(suffix), "_chunk%02zu", i);
      write_sample(output_dir / (ep.id + suffix), samples[i]);
      ++written;
    }
    log_info("episode_forged", {{"episode", ep.id}, {"chunks", samples.size()}});
  }
  require(written > 0, ErrorKind::NoMotionFound,
          "no episode produced a trace sample");
  return written;
}

}  // namespace tracegen
