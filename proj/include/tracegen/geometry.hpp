#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "tracegen/common.hpp"

namespace tracegen {

// Depths at or below this are treated as "at or behind the camera plane".
inline constexpr double kMinDepth = 1e-9;

// Regular keypoint grid anchored to an image. Keypoint k = r * cols + c sits
// at the center of cell (r, c); positions are in pixel coordinates with the
// origin at the top-left image corner.
struct GridSpec {
  int rows = 20;
  int cols = 20;
  int image_width = 0;
  int image_height = 0;

  int point_count() const { return rows * cols; }

  void validate() const {
    require(rows >= 1 && cols >= 1, ErrorKind::InvalidArgument, "grid must be at least 1x1");
    require(image_width > 0 && image_height > 0, ErrorKind::InvalidArgument,
            "grid needs positive image dimensions");
  }

  Eigen::Vector2d position(int k) const {
    int r = k / cols;
    int c = k % cols;
    double x = (c + 0.5) * static_cast<double>(image_width) / cols;
    double y = (r + 0.5) * static_cast<double>(image_height) / rows;
    return {x, y};
  }

  bool operator==(const GridSpec& o) const {
    return rows == o.rows && cols == o.cols && image_width == o.image_width &&
           image_height == o.image_height;
  }
};

// Pinhole camera. rotation/translation map world points into the camera
// frame: p_cam = R * p_world + t. The camera looks down +Z of its own frame.
struct CameraModel {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  void validate(double tol = 1e-9) const {
    require(fx > 0.0 && fy > 0.0, ErrorKind::InvalidArgument, "focal lengths must be positive");
    Eigen::Matrix3d gram = rotation.transpose() * rotation;
    double ortho_err = (gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    require(ortho_err <= tol, ErrorKind::BadRotation, "rotation is not orthonormal");
    require(std::abs(rotation.determinant() - 1.0) <= tol, ErrorKind::BadRotation,
            "rotation determinant is not +1");
  }

  Eigen::Vector3d world_to_camera(const Eigen::Vector3d& p_world) const {
    return rotation * p_world + translation;
  }

  Eigen::Vector3d camera_to_world(const Eigen::Vector3d& p_cam) const {
    return rotation.transpose() * (p_cam - translation);
  }

  bool operator==(const CameraModel& o) const {
    return fx == o.fx && fy == o.fy && cx == o.cx && cy == o.cy &&
           rotation == o.rotation && translation == o.translation;
  }
};

// Screen coordinates are (x px, y px, z m) where z is the camera-frame depth.
inline Eigen::Vector3d project_camera_to_screen(const Eigen::Vector3d& p_cam,
                                                const CameraModel& cam) {
  require(p_cam.z() > kMinDepth, ErrorKind::BehindCamera,
          "point at or behind the camera plane (z=" + std::to_string(p_cam.z()) + ")");
  return {cam.fx * p_cam.x() / p_cam.z() + cam.cx,
          cam.fy * p_cam.y() / p_cam.z() + cam.cy,
          p_cam.z()};
}

inline Eigen::Vector3d project_world_to_screen(const Eigen::Vector3d& p_world,
                                               const CameraModel& cam) {
  return project_camera_to_screen(cam.world_to_camera(p_world), cam);
}

inline Eigen::Vector3d unproject_screen_to_camera(const Eigen::Vector3d& screen,
                                                  const CameraModel& cam) {
  double z = screen.z();
  require(z > kMinDepth, ErrorKind::NonPositiveDepth,
          "cannot unproject non-positive depth " + std::to_string(z));
  return {z * (screen.x() - cam.cx) / cam.fx, z * (screen.y() - cam.cy) / cam.fy, z};
}

inline Eigen::Vector3d unproject_screen_to_world(const Eigen::Vector3d& screen,
                                                 const CameraModel& cam) {
  return cam.camera_to_world(unproject_screen_to_camera(screen, cam));
}

// Camera at `eye` with +Z pointing at `target` and +Y as close to -up as the
// view direction allows (image y grows downward).
inline CameraModel look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
                           const Eigen::Vector3d& up, double fx, double fy, double cx,
                           double cy) {
  Eigen::Vector3d forward = target - eye;
  require(forward.norm() > 1e-12, ErrorKind::InvalidArgument, "look_at eye equals target");
  forward.normalize();
  Eigen::Vector3d right = forward.cross(up);
  require(right.norm() > 1e-12, ErrorKind::InvalidArgument, "look_at up parallel to view");
  right.normalize();
  Eigen::Vector3d down = forward.cross(right);

  CameraModel cam;
  cam.fx = fx;
  cam.fy = fy;
  cam.cx = cx;
  cam.cy = cy;
  cam.rotation.row(0) = right;
  cam.rotation.row(1) = down;
  cam.rotation.row(2) = forward;
  cam.translation = -(cam.rotation * eye);
  return cam;
}

}  // namespace tracegen
