#include "tracegen/trace.hpp"

#include <gtest/gtest.h>

#include "tracegen/rng.hpp"

namespace tracegen {
namespace {

GridSpec small_grid() {
  GridSpec grid;
  grid.rows = 3;
  grid.cols = 4;
  grid.image_width = 64;
  grid.image_height = 48;
  return grid;
}

ScreenTrace random_trace(Rng& rng, const GridSpec& grid, int horizon) {
  ScreenTrace t = ScreenTrace::zeros(grid, horizon);
  for (int k = 0; k < t.point_count(); ++k) {
    for (int f = 0; f < t.frame_count(); ++f) {
      t.at(k, f) = Eigen::Vector3d(rng.uniform(0, 64), rng.uniform(0, 48),
                                   rng.uniform(0.2, 3.0));
    }
  }
  return t;
}

TEST(Trace, IncrementRoundTripExact) {
  Rng rng(3);
  GridSpec grid = small_grid();
  ScreenTrace trace = random_trace(rng, grid, 7);
  TraceIncrements inc = increments_from_trace(trace);
  EXPECT_EQ(inc.horizon, 7);
  EXPECT_EQ(inc.point_count(), trace.point_count());

  std::vector<double> initial(trace.points.begin(),
                              trace.points.begin() + trace.point_count() * 3);
  // The first frame is stored keypoint-major, so gather explicitly.
  for (int k = 0; k < trace.point_count(); ++k) {
    Eigen::Vector3d p = trace.at(k, 0);
    initial[static_cast<size_t>(k) * 3] = p.x();
    initial[static_cast<size_t>(k) * 3 + 1] = p.y();
    initial[static_cast<size_t>(k) * 3 + 2] = p.z();
  }
  ScreenTrace back = trace_from_increments(inc, initial, grid);
  double max_err = 0.0;
  for (int k = 0; k < trace.point_count(); ++k) {
    for (int f = 0; f < trace.frame_count(); ++f) {
      max_err = std::max(max_err, (back.at(k, f) - trace.at(k, f)).norm());
    }
  }
  // Each frame costs one subtraction plus one addition in double precision,
  // so the accumulated error stays far below the 1e-9 contract.
  EXPECT_LT(max_err, 1e-9);
}

TEST(Trace, InvalidFramesMaskIncrements) {
  GridSpec grid = small_grid();
  ScreenTrace trace = ScreenTrace::zeros(grid, 3);
  for (int f = 0; f < 4; ++f) trace.at(0, f) = Eigen::Vector3d(f, 2.0 * f, 1.0);
  trace.set_valid(0, 2, false);
  TraceIncrements inc = increments_from_trace(trace);
  EXPECT_TRUE(inc.is_valid(0, 0));
  EXPECT_FALSE(inc.is_valid(0, 1));  // frame 2 invalid kills increments 1 and 2
  EXPECT_FALSE(inc.is_valid(0, 2));
  EXPECT_DOUBLE_EQ(inc.at(0, 0).x(), 1.0);
}

TEST(Trace, SingleFrameTraceRejected) {
  GridSpec grid = small_grid();
  EXPECT_THROW(ScreenTrace::zeros(grid, 0), Error);
  ScreenTrace t = ScreenTrace::zeros(grid, 1);
  t.horizon = 0;
  t.points.resize(static_cast<size_t>(t.point_count()) * 3);
  t.valid.resize(static_cast<size_t>(t.point_count()));
  EXPECT_THROW(increments_from_trace(t), Error);
}

TEST(Trace, ShapeMismatchDetected) {
  GridSpec grid = small_grid();
  ScreenTrace t = ScreenTrace::zeros(grid, 2);
  t.points.pop_back();
  EXPECT_THROW(t.check_shape(), Error);

  TraceIncrements inc;
  inc.grid_rows = 2;
  inc.grid_cols = 2;
  inc.horizon = 2;
  inc.deltas.assign(4 * 2 * 3 - 1, 0.0);
  inc.valid.assign(4 * 2, 1);
  inc.z_valid.assign(4, 1);
  EXPECT_THROW(inc.check_shape(), Error);
}

TEST(Trace, NormStatsMatchHandComputedValues) {
  // Two keypoints, one increment each: deltas (1,2,3) and (3,2,1).
  TraceIncrements inc;
  inc.grid_rows = 1;
  inc.grid_cols = 2;
  inc.horizon = 1;
  inc.deltas = {1, 2, 3, 3, 2, 1};
  inc.valid = {1, 1};
  inc.z_valid = {1, 1};
  NormStats stats = compute_norm_stats({inc});
  EXPECT_DOUBLE_EQ(stats.mean.x(), 2.0);
  EXPECT_DOUBLE_EQ(stats.mean.y(), 2.0);
  EXPECT_DOUBLE_EQ(stats.mean.z(), 2.0);
  EXPECT_NEAR(stats.stddev.x(), 1.0, 1e-12);  // population std of {1, 3}
  EXPECT_NEAR(stats.stddev.y(), 1e-8, 1e-15); // constant channel hits the floor
  EXPECT_NEAR(stats.stddev.z(), 1.0, 1e-12);
}

TEST(Trace, NormStatsSkipInvalidEntries) {
  TraceIncrements inc;
  inc.grid_rows = 1;
  inc.grid_cols = 2;
  inc.horizon = 1;
  inc.deltas = {1, 1, 1, 100, 100, 100};
  inc.valid = {1, 0};
  inc.z_valid = {1, 1};
  NormStats stats = compute_norm_stats({inc});
  EXPECT_DOUBLE_EQ(stats.mean.x(), 1.0);
}

TEST(Trace, StandardizeRoundTrip) {
  Rng rng(5);
  GridSpec grid = small_grid();
  ScreenTrace trace = random_trace(rng, grid, 4);
  TraceIncrements inc = increments_from_trace(trace);
  TraceIncrements original = inc;
  NormStats stats = compute_norm_stats({inc});
  standardize(inc, stats);
  destandardize(inc, stats);
  for (size_t i = 0; i < inc.deltas.size(); ++i) {
    EXPECT_NEAR(inc.deltas[i], original.deltas[i], 1e-12);
  }
}

TEST(Trace, EmptyCorpusRejected) {
  TraceIncrements inc;
  inc.grid_rows = 1;
  inc.grid_cols = 1;
  inc.horizon = 1;
  inc.deltas = {1, 2, 3};
  inc.valid = {0};
  inc.z_valid = {1};
  EXPECT_THROW(compute_norm_stats({inc}), Error);
}

}  // namespace
}  // namespace tracegen
