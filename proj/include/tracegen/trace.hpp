#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "tracegen/common.hpp"
#include "tracegen/geometry.hpp"

namespace tracegen {

// Per-channel normalization statistics for (x, y, z) increments. Stored with
// trained models so sampling can undo the standardization.
struct NormStats {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Vector3d stddev = Eigen::Vector3d::Ones();
};

// A screen-aligned trace: `point_count` keypoints tracked over horizon+1
// frames. Each point is (x px, y px, z m) in the reference camera. `valid`
// marks per-frame tracking validity; `z_valid` marks keypoints whose depth
// channel is trustworthy (some upstream tracks are 2D-only).
struct ScreenTrace {
  GridSpec grid;
  int horizon = 0;
  std::vector<double> points;   // point_count * (horizon+1) * 3
  std::vector<uint8_t> valid;   // point_count * (horizon+1)
  std::vector<uint8_t> z_valid; // point_count

  int point_count() const { return grid.point_count(); }
  int frame_count() const { return horizon + 1; }

  static ScreenTrace zeros(const GridSpec& grid, int horizon) {
    grid.validate();
    require(horizon >= 1, ErrorKind::HorizonMismatch, "trace horizon must be >= 1");
    ScreenTrace t;
    t.grid = grid;
    t.horizon = horizon;
    t.points.assign(static_cast<size_t>(grid.point_count()) * (horizon + 1) * 3, 0.0);
    t.valid.assign(static_cast<size_t>(grid.point_count()) * (horizon + 1), 1);
    t.z_valid.assign(static_cast<size_t>(grid.point_count()), 1);
    return t;
  }

  size_t index(int k, int t) const {
    return (static_cast<size_t>(k) * frame_count() + t) * 3;
  }

  Eigen::Map<Eigen::Vector3d> at(int k, int t) {
    return Eigen::Map<Eigen::Vector3d>(points.data() + index(k, t));
  }
  Eigen::Map<const Eigen::Vector3d> at(int k, int t) const {
    return Eigen::Map<const Eigen::Vector3d>(points.data() + index(k, t));
  }

  bool is_valid(int k, int t) const {
    return valid[static_cast<size_t>(k) * frame_count() + t] != 0;
  }
  void set_valid(int k, int t, bool v) {
    valid[static_cast<size_t>(k) * frame_count() + t] = v ? 1 : 0;
  }

  void check_shape() const {
    grid.validate();
    require(horizon >= 1, ErrorKind::HorizonMismatch, "trace horizon must be >= 1");
    size_t n = static_cast<size_t>(point_count());
    require(points.size() == n * frame_count() * 3, ErrorKind::ShapeMismatch,
            "trace point buffer size mismatch");
    require(valid.size() == n * frame_count(), ErrorKind::ShapeMismatch,
            "trace validity buffer size mismatch");
    require(z_valid.size() == n, ErrorKind::ShapeMismatch,
            "trace z_valid buffer size mismatch");
  }
};

// Temporal differences of a trace. Entry (k, t) is trace[k][t+1] - trace[k][t]
// and is valid only when both endpoints were tracked.
struct TraceIncrements {
  int grid_rows = 0;
  int grid_cols = 0;
  int horizon = 0;
  std::vector<double> deltas;   // point_count * horizon * 3
  std::vector<uint8_t> valid;   // point_count * horizon
  std::vector<uint8_t> z_valid; // point_count

  int point_count() const { return grid_rows * grid_cols; }

  size_t index(int k, int t) const {
    return (static_cast<size_t>(k) * horizon + t) * 3;
  }

  Eigen::Map<Eigen::Vector3d> at(int k, int t) {
    return Eigen::Map<Eigen::Vector3d>(deltas.data() + index(k, t));
  }
  Eigen::Map<const Eigen::Vector3d> at(int k, int t) const {
    return Eigen::Map<const Eigen::Vector3d>(deltas.data() + index(k, t));
  }

  bool is_valid(int k, int t) const {
    return valid[static_cast<size_t>(k) * horizon + t] != 0;
  }

  void check_shape() const {
    require(grid_rows >= 1 && grid_cols >= 1, ErrorKind::ShapeMismatch,
            "increments need positive grid dimensions");
    require(horizon >= 1, ErrorKind::HorizonMismatch, "increments horizon must be >= 1");
    size_t n = static_cast<size_t>(point_count());
    require(deltas.size() == n * horizon * 3, ErrorKind::ShapeMismatch,
            "increment buffer size mismatch");
    require(valid.size() == n * horizon, ErrorKind::ShapeMismatch,
            "increment validity buffer size mismatch");
    require(z_valid.size() == n, ErrorKind::ShapeMismatch,
            "increment z_valid buffer size mismatch");
  }
};

inline TraceIncrements increments_from_trace(const ScreenTrace& trace) {
  trace.check_shape();
  require(trace.horizon >= 1, ErrorKind::HorizonMismatch,
          "need at least two frames to form increments");
  TraceIncrements inc;
  inc.grid_rows = trace.grid.rows;
  inc.grid_cols = trace.grid.cols;
  inc.horizon = trace.horizon;
  int n = trace.point_count();
  inc.deltas.assign(static_cast<size_t>(n) * trace.horizon * 3, 0.0);
  inc.valid.assign(static_cast<size_t>(n) * trace.horizon, 0);
  inc.z_valid = trace.z_valid;
  for (int k = 0; k < n; ++k) {
    for (int t = 0; t < trace.horizon; ++t) {
      if (trace.is_valid(k, t) && trace.is_valid(k, t + 1)) {
        inc.at(k, t) = trace.at(k, t + 1) - trace.at(k, t);
        inc.valid[static_cast<size_t>(k) * trace.horizon + t] = 1;
      }
    }
  }
  return inc;
}

// Rebuilds a trace by cumulative summation from an initial frame. Invalid
// increments contribute zero motion; the rebuilt trace is marked fully valid
// because every frame has a defined position.
inline ScreenTrace trace_from_increments(const TraceIncrements& inc,
                                         const std::vector<double>& initial_frame,
                                         const GridSpec& grid) {
  inc.check_shape();
  require(grid.rows == inc.grid_rows && grid.cols == inc.grid_cols,
          ErrorKind::ShapeMismatch, "grid does not match increment dimensions");
  int n = inc.point_count();
  require(initial_frame.size() == static_cast<size_t>(n) * 3, ErrorKind::ShapeMismatch,
          "initial frame must hold point_count x 3 values");
  ScreenTrace trace = ScreenTrace::zeros(grid, inc.horizon);
  trace.z_valid = inc.z_valid;
  for (int k = 0; k < n; ++k) {
    Eigen::Vector3d p(initial_frame[static_cast<size_t>(k) * 3],
                      initial_frame[static_cast<size_t>(k) * 3 + 1],
                      initial_frame[static_cast<size_t>(k) * 3 + 2]);
    trace.at(k, 0) = p;
    for (int t = 0; t < inc.horizon; ++t) {
      if (inc.is_valid(k, t)) p += inc.at(k, t);
      trace.at(k, t + 1) = p;
    }
  }
  return trace;
}

// Corpus-level per-channel moments over valid increments. The standard
// deviation is floored so later standardization never divides by zero (an
// all-static corpus is legal input).
inline NormStats compute_norm_stats(const std::vector<TraceIncrements>& corpus) {
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  Eigen::Vector3d sum_sq = Eigen::Vector3d::Zero();
  int64_t count = 0;
  for (const auto& inc : corpus) {
    inc.check_shape();
    for (int k = 0; k < inc.point_count(); ++k) {
      for (int t = 0; t < inc.horizon; ++t) {
        if (!inc.is_valid(k, t)) continue;
        Eigen::Vector3d d = inc.at(k, t);
        sum += d;
        sum_sq += d.cwiseProduct(d);
        ++count;
      }
    }
  }
  require(count > 0, ErrorKind::EmptyTrace, "no valid increments in corpus");
  NormStats stats;
  stats.mean = sum / static_cast<double>(count);
  Eigen::Vector3d var = sum_sq / static_cast<double>(count) -
                        stats.mean.cwiseProduct(stats.mean);
  for (int i = 0; i < 3; ++i) {
    stats.stddev[i] = std::sqrt(std::max(var[i], 0.0));
    if (stats.stddev[i] < 1e-8) stats.stddev[i] = 1e-8;
  }
  return stats;
}

inline void standardize(TraceIncrements& inc, const NormStats& stats) {
  for (int k = 0; k < inc.point_count(); ++k) {
    for (int t = 0; t < inc.horizon; ++t) {
      Eigen::Map<Eigen::Vector3d> d = inc.at(k, t);
      d = (d - stats.mean).cwiseQuotient(stats.stddev);
    }
  }
}

inline void destandardize(TraceIncrements& inc, const NormStats& stats) {
  for (int k = 0; k < inc.point_count(); ++k) {
    for (int t = 0; t < inc.horizon; ++t) {
      Eigen::Map<Eigen::Vector3d> d = inc.at(k, t);
      d = d.cwiseProduct(stats.stddev) + stats.mean;
    }
  }
}

}  // namespace tracegen
