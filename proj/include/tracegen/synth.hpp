#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tracegen/common.hpp"
#include "tracegen/forge.hpp"
#include "tracegen/geometry.hpp"
#include "tracegen/image.hpp"
#include "tracegen/rng.hpp"

namespace tracegen {

enum class MotionFamily { LinearTransport, ArcTransport, PickPlace, Sweep };
enum class CameraPath { Static, Orbit, HandheldJitter };

inline const char* to_string(MotionFamily f) {
  switch (f) {
    case MotionFamily::LinearTransport: return "linear-transport";
    case MotionFamily::ArcTransport: return "arc-transport";
    case MotionFamily::PickPlace: return "pick-place";
    case MotionFamily::Sweep: return "sweep";
  }
  return "unknown";
}

inline MotionFamily parse_motion_family(const std::string& s) {
  if (s == "linear-transport") return MotionFamily::LinearTransport;
  if (s == "arc-transport") return MotionFamily::ArcTransport;
  if (s == "pick-place") return MotionFamily::PickPlace;
  if (s == "sweep") return MotionFamily::Sweep;
  fail(ErrorKind::InvalidArgument, "unknown motion family: " + s);
}

inline const char* to_string(CameraPath p) {
  switch (p) {
    case CameraPath::Static: return "static";
    case CameraPath::Orbit: return "orbit";
    case CameraPath::HandheldJitter: return "handheld-jitter";
  }
  return "unknown";
}

inline CameraPath parse_camera_path(const std::string& s) {
  if (s == "static") return CameraPath::Static;
  if (s == "orbit") return CameraPath::Orbit;
  if (s == "handheld-jitter") return CameraPath::HandheldJitter;
  fail(ErrorKind::InvalidArgument, "unknown camera path: " + s);
}

// Everything needed to generate one synthetic episode. Tracks are seeded on a
// regular pixel grid (back-projected onto scene surfaces), a subset rides a
// rigidly moving carrier, and the scene is rendered as flat-shaded blobs over
// a textured ground plane.
struct SceneSpec {
  uint64_t seed = 0;
  MotionFamily family = MotionFamily::LinearTransport;
  CameraPath camera_path = CameraPath::Static;
  double moving_fraction = 0.25;
  double two_d_only_fraction = 0.0;  // tracks flagged as depthless
  int track_rows = 20;
  int track_cols = 20;
  int image_width = 160;
  int image_height = 120;
  double focal = 0.0;  // <= 0 selects 1.05 * image_width
  int episode_len = 40;
  int lead_in = 6;
  int tail = 6;
  double fps = 15.0;
  Eigen::Vector3d workspace_min{-0.35, -0.25, 0.0};
  Eigen::Vector3d workspace_max{0.35, 0.25, 0.30};

  int track_count() const { return track_rows * track_cols; }
  int motion_first() const { return lead_in; }                 // first moved frame
  int motion_last() const { return episode_len - tail - 1; }   // last moved frame

  void validate() const {
    require(track_rows >= 1 && track_cols >= 1, ErrorKind::InvalidArgument,
            "need at least one track");
    require(image_width >= 16 && image_height >= 16, ErrorKind::InvalidArgument,
            "image too small to render");
    require(moving_fraction >= 0.0 && moving_fraction <= 1.0, ErrorKind::InvalidArgument,
            "moving fraction must lie in [0, 1]");
    require(two_d_only_fraction >= 0.0 && two_d_only_fraction <= 1.0,
            ErrorKind::InvalidArgument, "2d-only fraction must lie in [0, 1]");
    require(lead_in >= 1 && tail >= 1, ErrorKind::InvalidArgument,
            "need at least one static frame on each side");
    require(motion_last() - motion_first() + 1 >= 2, ErrorKind::InvalidArgument,
            "episode too short for its lead-in and tail");
    require((workspace_max - workspace_min).minCoeff() > 0.0, ErrorKind::InvalidArgument,
            "workspace box is degenerate");
    require(fps > 0.0, ErrorKind::InvalidArgument, "fps must be positive");
  }
};

struct GeneratedScene {
  SceneSpec spec;
  RawTrackSet tracks;
  std::vector<Image8> frames;
  std::vector<ImageF> depths;
  std::vector<std::string> instructions;
  std::vector<int> moving_tracks;
  int anchor_track = -1;  // moving track closest to the carrier centroid
  Eigen::Vector3d displacement = Eigen::Vector3d::Zero();  // world, start to end
  double arc_length = 0.0;  // world-space length of the continuous path
  double workspace_diameter = 0.0;
};

namespace detail {

// Rigid carrier displacement at path fraction u in [0, 1]. All moving tracks
// share this offset, so endpoints and arc lengths have closed forms.
struct MotionPath {
  MotionFamily family;
  Eigen::Vector3d d;     // net displacement, horizontal
  double lift = 0.0;     // vertical extent for pick-place
  double bulge = 0.0;    // lateral extent for sweep

  Eigen::Vector3d offset(double u) const {
    switch (family) {
      case MotionFamily::LinearTransport:
        return d * u;
      case MotionFamily::ArcTransport: {
        double r = 0.5 * d.norm();
        return 0.5 * d * (1.0 - std::cos(M_PI * u)) +
               Eigen::Vector3d(0, 0, r * std::sin(M_PI * u));
      }
      case MotionFamily::PickPlace: {
        double total = 2.0 * lift + d.norm();
        double s = u * total;
        if (s <= lift) return {0, 0, s};
        if (s <= lift + d.norm()) return Eigen::Vector3d(0, 0, lift) + d * ((s - lift) / d.norm());
        return d + Eigen::Vector3d(0, 0, lift - (s - lift - d.norm()));
      }
      case MotionFamily::Sweep: {
        Eigen::Vector3d lateral = d.cross(Eigen::Vector3d(0, 0, 1));
        lateral = lateral.norm() > 1e-12 ? lateral.normalized() : Eigen::Vector3d(0, 1, 0);
        Eigen::Vector3d mid = 0.5 * d + bulge * lateral;
        double leg = mid.norm();
        double total = leg + (d - mid).norm();
        double s = u * total;
        if (s <= leg) return mid * (s / leg);
        return mid + (d - mid) * ((s - leg) / (d - mid).norm());
      }
    }
    return Eigen::Vector3d::Zero();
  }

  double arc_length() const {
    switch (family) {
      case MotionFamily::LinearTransport:
        return d.norm();
      case MotionFamily::ArcTransport:
        return 0.5 * M_PI * d.norm();
      case MotionFamily::PickPlace:
        return 2.0 * lift + d.norm();
      case MotionFamily::Sweep: {
        Eigen::Vector3d lateral = d.cross(Eigen::Vector3d(0, 0, 1));
        lateral = lateral.norm() > 1e-12 ? lateral.normalized() : Eigen::Vector3d(0, 1, 0);
        Eigen::Vector3d mid = 0.5 * d + bulge * lateral;
        return mid.norm() + (d - mid).norm();
      }
    }
    return 0.0;
  }
};

inline MotionPath make_motion_path(const SceneSpec& spec, Rng& rng) {
  Eigen::Vector3d extent = spec.workspace_max - spec.workspace_min;
  MotionPath path;
  path.family = spec.family;
  // Family-specific canonical direction plus a small per-episode jitter, so
  // instruction-conditioned models have a learnable but non-degenerate target.
  Eigen::Vector3d dir;
  switch (spec.family) {
    case MotionFamily::LinearTransport: dir = {1, 0, 0}; break;
    case MotionFamily::ArcTransport: dir = {0, 1, 0}; break;
    case MotionFamily::PickPlace: dir = {-1, 0, 0}; break;
    case MotionFamily::Sweep: dir = {0, -1, 0}; break;
  }
  double along = 0.30 * (std::abs(dir.x()) > 0.5 ? extent.x() : extent.y());
  along *= 1.0 + 0.10 * rng.uniform(-1, 1);
  Eigen::Vector3d cross_dir(dir.y(), dir.x(), 0);  // horizontal, orthogonal to dir
  double across = 0.05 * extent.norm() * rng.uniform(-1, 1);
  path.d = dir * along + cross_dir * across;
  path.lift = 0.35 * extent.z() * (1.0 + 0.10 * rng.uniform(-1, 1));
  path.bulge = 0.30 * path.d.norm();
  return path;
}

struct RenderContext {
  double focal = 0.0;
  double cx = 0.0, cy = 0.0;
  Eigen::Vector3d ws_center = Eigen::Vector3d::Zero();
  double blob_radius = 0.0;
};

// Deterministic per-pixel ground texture keyed to world coordinates so the
// pattern stays put under camera motion.
inline void plane_color(double wx, double wy, uint8_t* px) {
  uint64_t h = splitmix64((static_cast<uint64_t>(static_cast<int64_t>(std::floor(wx * 40.0)) &
                                                 0xffffffffLL)
                           << 32) ^
                          (static_cast<uint64_t>(static_cast<int64_t>(std::floor(wy * 40.0)) &
                                                 0xffffffffLL)));
  int n = static_cast<int>(h % 21) - 10;
  px[0] = static_cast<uint8_t>(96 + n);
  px[1] = static_cast<uint8_t>(104 + n);
  px[2] = static_cast<uint8_t>(92 + n);
}

inline void render_frame(const RenderContext& ctx, const CameraModel& cam,
                         const RawTrackSet& tracks, int t,
                         const std::vector<std::array<uint8_t, 3>>& colors, Image8& image,
                         ImageF& depth) {
  int w = image.width, h = image.height;
  Eigen::Matrix3d rt = cam.rotation.transpose();
  Eigen::Vector3d eye = -(rt * cam.translation);

  // Ground plane z = 0 by per-pixel ray casting; sky where the ray points up.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      Eigen::Vector3d dir_cam((x + 0.5 - cam.cx) / cam.fx, (y + 0.5 - cam.cy) / cam.fy, 1.0);
      Eigen::Vector3d dir_world = rt * dir_cam;
      uint8_t* px = image.at(x, y);
      if (std::abs(dir_world.z()) < 1e-12) {
        px[0] = px[1] = px[2] = 245;
        depth.at(x, y) = 0.0f;
        continue;
      }
      double s = -eye.z() / dir_world.z();  // camera-frame depth at the hit
      if (s <= kMinDepth) {
        px[0] = 245;
        px[1] = 245;
        px[2] = 250;
        depth.at(x, y) = 0.0f;
        continue;
      }
      Eigen::Vector3d hit = eye + s * dir_world;
      plane_color(hit.x(), hit.y(), px);
      depth.at(x, y) = static_cast<float>(s);
    }
  }

  // Flat z-buffered disks at the track points. A disk carries its center's
  // depth, so the depth map at a keypoint pixel equals the keypoint depth.
  for (int k = 0; k < tracks.track_count; ++k) {
    if (!tracks.is_valid(k, t)) continue;
    Eigen::Vector3d p_cam = cam.world_to_camera(tracks.at(k, t));
    if (p_cam.z() <= kMinDepth) continue;
    Eigen::Vector3d s = project_camera_to_screen(p_cam, cam);
    double r_px = cam.fx * ctx.blob_radius / s.z();
    int x0 = std::max(0, static_cast<int>(std::floor(s.x() - r_px)));
    int x1 = std::min(w - 1, static_cast<int>(std::ceil(s.x() + r_px)));
    int y0 = std::max(0, static_cast<int>(std::floor(s.y() - r_px)));
    int y1 = std::min(h - 1, static_cast<int>(std::ceil(s.y() + r_px)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        double dx = x + 0.5 - s.x();
        double dy = y + 0.5 - s.y();
        if (dx * dx + dy * dy > r_px * r_px) continue;
        float old = depth.at(x, y);
        if (old > 0.0f && old <= static_cast<float>(s.z())) continue;
        depth.at(x, y) = static_cast<float>(s.z());
        uint8_t* px = image.at(x, y);
        px[0] = colors[static_cast<size_t>(k)][0];
        px[1] = colors[static_cast<size_t>(k)][1];
        px[2] = colors[static_cast<size_t>(k)][2];
      }
    }
  }
}

inline std::vector<std::string> make_instructions(MotionFamily family, Rng& rng) {
  static const char* objects[] = {"red block", "blue cup", "green sponge",
                                  "yellow cube", "small tray"};
  static const char* targets[] = {"left tray", "right bin", "center mat",
                                  "far corner", "near edge"};
  std::string o = objects[rng.uniform_index(5)];
  std::string t = targets[rng.uniform_index(5)];
  auto fill = [&](const char* tpl) {
    std::string s(tpl);
    auto sub = [&s](const std::string& key, const std::string& val) {
      size_t pos = s.find(key);
      if (pos != std::string::npos) s.replace(pos, key.size(), val);
    };
    sub("{o}", o);
    sub("{t}", t);
    return s;
  };
  switch (family) {
    case MotionFamily::LinearTransport:
      return {fill("slide the {o} to the {t}."),
              fill("push the {o} straight over to the {t}."),
              fill("move the {o} across the table until it reaches the {t}.")};
    case MotionFamily::ArcTransport:
      return {fill("lift the {o} and carry it over to the {t} in one smooth arc."),
              fill("swing the {o} up and across to the {t}."),
              fill("carry the {o} along an arc and set it down at the {t}.")};
    case MotionFamily::PickPlace:
      return {fill("pick up the {o} and place it on the {t}."),
              fill("grab the {o}, lift it, and put it down on the {t}."),
              fill("take the {o} and set it onto the {t}.")};
    case MotionFamily::Sweep:
      return {fill("sweep the {o} around to the {t}."),
              fill("brush the {o} sideways and bring it to the {t}."),
              fill("swipe the {o} out and around until it rests at the {t}.")};
  }
  fail(ErrorKind::InvalidArgument, "unknown motion family");
}

}  // namespace detail

inline GeneratedScene gen_scene(const SceneSpec& spec) {
  spec.validate();
  Rng rng(splitmix64(spec.seed ^ 0x53c3a11edULL));

  GeneratedScene scene;
  scene.spec = spec;
  scene.workspace_diameter = (spec.workspace_max - spec.workspace_min).norm();

  // Base camera framing the workspace from the front-top.
  Eigen::Vector3d extent = spec.workspace_max - spec.workspace_min;
  Eigen::Vector3d center = 0.5 * (spec.workspace_min + spec.workspace_max);
  Eigen::Vector3d ground_center(center.x(), center.y(), 0.0);
  double focal = spec.focal > 0.0 ? spec.focal : 1.05 * spec.image_width;
  double reach = extent.head<2>().norm();
  Eigen::Vector3d eye0 = ground_center + Eigen::Vector3d(0.0, -1.35 * reach, 1.05 * reach);
  Eigen::Vector3d look = ground_center + Eigen::Vector3d(0, 0, 0.2 * extent.z());
  double cx = 0.5 * spec.image_width;
  double cy = 0.5 * spec.image_height;
  CameraModel base = look_at(eye0, look, {0, 0, 1}, focal, focal, cx, cy);

  // Camera path. The pose at the first moved frame always equals the base
  // pose, so alignment comparisons against a static camera are meaningful.
  int n = spec.episode_len;
  std::vector<CameraModel> cameras(static_cast<size_t>(n), base);
  if (spec.camera_path == CameraPath::Orbit) {
    double amp = 0.35;  // radians of total sweep
    for (int t = 0; t < n; ++t) {
      double angle = amp * (t - spec.motion_first()) / n;
      Eigen::AngleAxisd rot(angle, Eigen::Vector3d(0, 0, 1));
      Eigen::Vector3d eye = ground_center + rot * (eye0 - ground_center);
      cameras[static_cast<size_t>(t)] = look_at(eye, look, {0, 0, 1}, focal, focal, cx, cy);
    }
  } else if (spec.camera_path == CameraPath::HandheldJitter) {
    double amp = 0.004 * reach;
    double px = rng.uniform(0, 2 * M_PI), py = rng.uniform(0, 2 * M_PI),
           pz = rng.uniform(0, 2 * M_PI);
    for (int t = 0; t < n; ++t) {
      double w1 = 2.0 * M_PI * (t - spec.motion_first()) / 17.0;
      double w2 = 2.0 * M_PI * (t - spec.motion_first()) / 7.0;
      Eigen::Vector3d wobble(amp * (std::sin(w1 + px) + 0.5 * std::sin(w2 + py)),
                             amp * (std::sin(w1 + py) + 0.5 * std::sin(w2 + pz)),
                             0.5 * amp * std::sin(w1 + pz));
      cameras[static_cast<size_t>(t)] =
          look_at(eye0 + wobble, look, {0, 0, 1}, focal, focal, cx, cy);
    }
  }

  // Track seeding: back-project a regular pixel grid through the base pose
  // onto the carrier surface (moving tracks) or the ground (static tracks).
  GridSpec track_grid;
  track_grid.rows = spec.track_rows;
  track_grid.cols = spec.track_cols;
  track_grid.image_width = spec.image_width;
  track_grid.image_height = spec.image_height;

  int K = spec.track_count();
  double cell_world = reach / std::max(spec.track_rows, spec.track_cols) * 0.5;
  double blob_radius = std::min(0.012, 0.38 * cell_world);
  double carrier_height = rng.uniform(0.2, 0.5) * extent.z();

  // Moving set: a disk of cells around a random interior center.
  int n_moving = static_cast<int>(std::lround(spec.moving_fraction * K));
  std::vector<int> order(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k) order[static_cast<size_t>(k)] = k;
  double cr = rng.uniform(0.35, 0.65) * spec.track_rows;
  double cc = rng.uniform(0.35, 0.65) * spec.track_cols;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    auto dist = [&](int k) {
      double dr = k / spec.track_cols - cr;
      double dc = k % spec.track_cols - cc;
      return dr * dr + dc * dc;
    };
    return dist(a) < dist(b);
  });
  std::vector<uint8_t> moving(static_cast<size_t>(K), 0);
  for (int i = 0; i < n_moving; ++i) moving[static_cast<size_t>(order[static_cast<size_t>(i)])] = 1;
  for (int k = 0; k < K; ++k) {
    if (moving[static_cast<size_t>(k)]) scene.moving_tracks.push_back(k);
  }

  Eigen::Matrix3d rt = base.rotation.transpose();
  Eigen::Vector3d eye_w = -(rt * base.translation);
  auto surface_point = [&](const Eigen::Vector2d& pixel, double height) {
    Eigen::Vector3d dir_cam((pixel.x() - base.cx) / base.fx,
                            (pixel.y() - base.cy) / base.fy, 1.0);
    Eigen::Vector3d dir_world = rt * dir_cam;
    require(std::abs(dir_world.z()) > 1e-9, ErrorKind::InvalidArgument,
            "track ray parallel to ground");
    double s = (height - eye_w.z()) / dir_world.z();
    require(s > kMinDepth, ErrorKind::InvalidArgument, "track ray misses the workspace");
    return Eigen::Vector3d(eye_w + s * dir_world);
  };

  detail::MotionPath path = detail::make_motion_path(spec, rng);
  scene.displacement = path.d;
  if (spec.family == MotionFamily::PickPlace) {
    // Lift returns to the surface; net displacement stays horizontal.
  }
  scene.arc_length = n_moving > 0 ? path.arc_length() : 0.0;

  RawTrackSet& tracks = scene.tracks;
  tracks.track_count = K;
  tracks.frame_count = n;
  tracks.fps = spec.fps;
  tracks.world_points.resize(static_cast<size_t>(K) * n * 3);
  tracks.valid.assign(static_cast<size_t>(K) * n, 1);
  tracks.has_depth.assign(static_cast<size_t>(K), 1);
  tracks.cameras = cameras;

  int m0 = spec.motion_first();
  int m1 = spec.motion_last();
  std::vector<Eigen::Vector3d> starts(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k) {
    double height = (moving[static_cast<size_t>(k)] ? carrier_height : 0.0) + blob_radius;
    starts[static_cast<size_t>(k)] = surface_point(track_grid.position(k), height);
    if (rng.uniform() < spec.two_d_only_fraction) tracks.has_depth[static_cast<size_t>(k)] = 0;
  }
  for (int k = 0; k < K; ++k) {
    for (int t = 0; t < n; ++t) {
      Eigen::Vector3d p = starts[static_cast<size_t>(k)];
      if (moving[static_cast<size_t>(k)] && t >= m0) {
        double u = t > m1 ? 1.0
                          : static_cast<double>(t - m0 + 1) / static_cast<double>(m1 - m0 + 1);
        p += path.offset(u);
      }
      tracks.at(k, t) = p;
    }
  }

  // Anchor: the moving track whose start is closest to the moving centroid.
  if (n_moving > 0) {
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (int k : scene.moving_tracks) centroid += starts[static_cast<size_t>(k)];
    centroid /= static_cast<double>(n_moving);
    double best = 0.0;
    for (int k : scene.moving_tracks) {
      double d2 = (starts[static_cast<size_t>(k)] - centroid).squaredNorm();
      if (scene.anchor_track < 0 || d2 < best) {
        scene.anchor_track = k;
        best = d2;
      }
    }
  }

  // Colors: cool muted statics, one warm palette for the carrier.
  std::vector<std::array<uint8_t, 3>> colors(static_cast<size_t>(K));
  int base_r = 150 + static_cast<int>(rng.uniform_index(70));
  int base_g = 50 + static_cast<int>(rng.uniform_index(50));
  int base_b = 35 + static_cast<int>(rng.uniform_index(40));
  for (int k = 0; k < K; ++k) {
    uint64_t h = splitmix64(spec.seed ^ (0x9e37u + static_cast<uint64_t>(k)));
    int v = static_cast<int>(h % 31);
    if (moving[static_cast<size_t>(k)]) {
      colors[static_cast<size_t>(k)] = {static_cast<uint8_t>(base_r + v % 20),
                                        static_cast<uint8_t>(base_g + v % 15),
                                        static_cast<uint8_t>(base_b + v % 10)};
    } else {
      colors[static_cast<size_t>(k)] = {static_cast<uint8_t>(58 + v),
                                        static_cast<uint8_t>(66 + v),
                                        static_cast<uint8_t>(96 + v)};
    }
  }

  detail::RenderContext ctx;
  ctx.focal = focal;
  ctx.cx = cx;
  ctx.cy = cy;
  ctx.ws_center = center;
  ctx.blob_radius = blob_radius;
  scene.frames.reserve(static_cast<size_t>(n));
  scene.depths.reserve(static_cast<size_t>(n));
  for (int t = 0; t < n; ++t) {
    Image8 image = Image8::filled(spec.image_width, spec.image_height, 0, 0, 0);
    ImageF depth = ImageF::filled(spec.image_width, spec.image_height, 0.0f);
    detail::render_frame(ctx, cameras[static_cast<size_t>(t)], tracks, t, colors, image,
                         depth);
    scene.frames.push_back(std::move(image));
    scene.depths.push_back(std::move(depth));
  }

  scene.instructions = detail::make_instructions(spec.family, rng);
  return scene;
}

// Writes one generated scene in the forge episode layout.
inline void write_episode(const std::filesystem::path& dir, const GeneratedScene& scene) {
  std::filesystem::create_directories(dir / "frames");
  std::filesystem::create_directories(dir / "depth");
  write_tracks_f32(dir / "tracks.f32", scene.tracks);
  write_poses_json(dir / "poses.json", scene.tracks);
  write_text_file(dir / "instructions.json",
                  nlohmann::json{{"instructions", scene.instructions}}.dump(2) + "\n");
  for (int t = 0; t < scene.tracks.frame_count; ++t) {
    char fname[32], dname[32];
    std::snprintf(fname, sizeof(fname), "frame_%04d.png", t);
    std::snprintf(dname, sizeof(dname), "depth_%04d.f32", t);
    write_png(dir / "frames" / fname, scene.frames[static_cast<size_t>(t)]);
    write_depth_f32(dir / "depth" / dname, scene.depths[static_cast<size_t>(t)]);
  }
}

struct SuiteConfig {
  std::filesystem::path out_dir;
  int episodes = 8;
  uint64_t seed = 0;
  std::vector<MotionFamily> families = {MotionFamily::LinearTransport,
                                        MotionFamily::ArcTransport,
                                        MotionFamily::PickPlace, MotionFamily::Sweep};
  SceneSpec base;  // family and seed fields are overwritten per episode
};

// Generates `episodes` scenes (families round-robin, per-episode seeds derived
// from the suite seed) and writes them plus a manifest with closed-form ground
// truth for evaluation.
inline nlohmann::json gen_benchmark_suite(const SuiteConfig& config) {
  require(config.episodes >= 1, ErrorKind::InvalidArgument, "need at least one episode");
  require(!config.families.empty(), ErrorKind::InvalidArgument, "need at least one family");
  std::filesystem::create_directories(config.out_dir);

  nlohmann::json manifest;
  manifest["format_version"] = 1;
  manifest["tool_version"] = kToolVersion;
  manifest["seed"] = config.seed;
  nlohmann::json episodes = nlohmann::json::array();

  for (int i = 0; i < config.episodes; ++i) {
    SceneSpec spec = config.base;
    spec.seed = derive_seed(config.seed, static_cast<uint64_t>(i));
    spec.family = config.families[static_cast<size_t>(i) % config.families.size()];
    GeneratedScene scene = gen_scene(spec);

    char name[32];
    std::snprintf(name, sizeof(name), "ep_%04d", i);
    write_episode(config.out_dir / name, scene);

    nlohmann::json ep;
    ep["id"] = name;
    ep["dir"] = name;
    ep["family"] = to_string(spec.family);
    ep["camera_path"] = to_string(spec.camera_path);
    ep["seed"] = spec.seed;
    ep["motion_first"] = spec.motion_first();
    ep["motion_last"] = spec.motion_last();
    ep["moving_tracks"] = scene.moving_tracks;
    ep["anchor_track"] = scene.anchor_track;
    ep["displacement_world"] = {scene.displacement.x(), scene.displacement.y(),
                                scene.displacement.z()};
    ep["arc_length_world"] = scene.arc_length;
    ep["workspace_diameter"] = scene.workspace_diameter;
    ep["instructions"] = scene.instructions;
    episodes.push_back(ep);
    log_info("episode_generated", {{"id", name}, {"family", to_string(spec.family)}});
  }
  manifest["episodes"] = episodes;
  write_text_file(config.out_dir / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

}  // namespace tracegen
