#include "tracegen/geometry.hpp"

#include <gtest/gtest.h>

#include <Eigen/Geometry>

#include "tracegen/rng.hpp"

namespace tracegen {
namespace {

CameraModel random_camera(Rng& rng) {
  Eigen::Vector3d axis(rng.normal(), rng.normal(), rng.normal());
  while (axis.norm() < 1e-6) axis = {rng.normal(), rng.normal(), rng.normal()};
  axis.normalize();
  double angle = rng.uniform(-M_PI, M_PI);
  CameraModel cam;
  cam.rotation = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
  cam.translation = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
  cam.fx = rng.uniform(50, 500);
  cam.fy = rng.uniform(50, 500);
  cam.cx = rng.uniform(40, 400);
  cam.cy = rng.uniform(30, 300);
  return cam;
}

TEST(Geometry, ProjectUnprojectRoundTrip) {
  Rng rng(7);
  for (int c = 0; c < 5; ++c) {
    CameraModel cam = random_camera(rng);
    cam.validate(1e-9);
    for (int i = 0; i < 1000; ++i) {
      // Build the world point from a camera-frame point with positive depth so
      // it is guaranteed visible.
      Eigen::Vector3d p_cam(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0.1, 10));
      Eigen::Vector3d p_world = cam.camera_to_world(p_cam);
      Eigen::Vector3d screen = project_world_to_screen(p_world, cam);
      Eigen::Vector3d back = unproject_screen_to_world(screen, cam);
      EXPECT_LT((back - p_world).norm(), 1e-9);
    }
  }
}

TEST(Geometry, ProjectionPixelFormula) {
  CameraModel cam;
  cam.fx = 100.0;
  cam.fy = 120.0;
  cam.cx = 64.0;
  cam.cy = 48.0;
  Eigen::Vector3d screen = project_world_to_screen({0.5, -0.25, 2.0}, cam);
  EXPECT_DOUBLE_EQ(screen.x(), 100.0 * 0.5 / 2.0 + 64.0);
  EXPECT_DOUBLE_EQ(screen.y(), 120.0 * -0.25 / 2.0 + 48.0);
  EXPECT_DOUBLE_EQ(screen.z(), 2.0);
}

TEST(Geometry, BehindCameraThrows) {
  CameraModel cam;
  EXPECT_THROW(project_world_to_screen({0, 0, -1}, cam), Error);
  EXPECT_THROW(project_world_to_screen({0, 0, 0}, cam), Error);
  try {
    project_world_to_screen({0, 0, -1}, cam);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BehindCamera);
  }
}

TEST(Geometry, UnprojectNonPositiveDepthThrows) {
  CameraModel cam;
  EXPECT_THROW(unproject_screen_to_camera({10, 10, 0.0}, cam), Error);
  EXPECT_THROW(unproject_screen_to_camera({10, 10, -0.5}, cam), Error);
  try {
    unproject_screen_to_camera({10, 10, 0.0}, cam);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonPositiveDepth);
  }
}

TEST(Geometry, ValidateRejectsBadRotation) {
  CameraModel cam;
  cam.rotation(0, 0) = 2.0;
  EXPECT_THROW(cam.validate(), Error);

  // A reflection is orthonormal but has determinant -1.
  CameraModel mirror;
  mirror.rotation = Eigen::Matrix3d::Identity();
  mirror.rotation(2, 2) = -1.0;
  EXPECT_THROW(mirror.validate(), Error);

  CameraModel bad_focal;
  bad_focal.fx = 0.0;
  EXPECT_THROW(bad_focal.validate(), Error);
}

TEST(Geometry, LookAtProducesValidPose) {
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    Eigen::Vector3d eye(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0.2, 2));
    Eigen::Vector3d target(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), 0.0);
    if ((target - eye).norm() < 0.3) continue;
    CameraModel cam = look_at(eye, target, {0, 0, 1}, 100, 100, 64, 48);
    cam.validate(1e-9);
    // The target projects to the principal point and sits in front.
    Eigen::Vector3d screen = project_world_to_screen(target, cam);
    EXPECT_NEAR(screen.x(), 64.0, 1e-6);
    EXPECT_NEAR(screen.y(), 48.0, 1e-6);
    EXPECT_GT(screen.z(), 0.0);
    // World up maps toward negative image y (image y grows downward).
    Eigen::Vector3d above = target + Eigen::Vector3d(0, 0, 0.1);
    Eigen::Vector3d screen_above = project_world_to_screen(above, cam);
    EXPECT_LT(screen_above.y(), screen.y());
  }
}

TEST(Geometry, GridPositionsCoverImageUniformly) {
  GridSpec grid;
  grid.rows = 4;
  grid.cols = 5;
  grid.image_width = 100;
  grid.image_height = 80;
  grid.validate();
  EXPECT_EQ(grid.point_count(), 20);
  // First cell center and row-major layout.
  EXPECT_DOUBLE_EQ(grid.position(0).x(), 10.0);
  EXPECT_DOUBLE_EQ(grid.position(0).y(), 10.0);
  EXPECT_DOUBLE_EQ(grid.position(1).x(), 30.0);
  EXPECT_DOUBLE_EQ(grid.position(5).y(), 30.0);
  // Last cell center stays inside the image.
  EXPECT_DOUBLE_EQ(grid.position(19).x(), 90.0);
  EXPECT_DOUBLE_EQ(grid.position(19).y(), 70.0);
}

TEST(Geometry, GridValidateRejectsDegenerate) {
  GridSpec grid;
  grid.rows = 0;
  grid.cols = 4;
  grid.image_width = 10;
  grid.image_height = 10;
  EXPECT_THROW(grid.validate(), Error);
}

}  // namespace
}  // namespace tracegen
