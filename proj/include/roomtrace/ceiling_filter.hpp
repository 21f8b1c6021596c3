// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0
//
// Grid-based elevation filtering that keeps the points near the top of each
// XOY grid cell (ceiling and wall tops), plus a RANSAC plane fit used to
// isolate the ceiling plane.

#ifndef ROOMTRACE_CEILING_FILTER_HPP
#define ROOMTRACE_CEILING_FILTER_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "roomtrace/ingest.hpp"

namespace roomtrace {

/// Reference height for the retention test: the maximum z of the point's
/// own grid cell, or the maximum z of the whole cloud.
enum class CeilingMaxMode { kPerCell, kGlobal };

struct CeilingFilterParams {
  double gamma{0.1};    ///< grid size over XOY (m)
  double delta_z{0.1};  ///< height tolerance below the reference max (m)
  CeilingMaxMode mode{CeilingMaxMode::kPerCell};
};

struct GridCell {
  std::int64_t m{0};
  std::int64_t n{0};
  friend bool operator==(const GridCell&, const GridCell&) = default;
};

/// (floor((x - x_min) / gamma), floor((y - y_min) / gamma)).
GridCell grid_cell_of(const Point3& p, double x_min, double y_min, double gamma);

/// Indices (ascending) of the points kept by grid_ceiling_filter.
std::vector<std::size_t> ceiling_filter_indices(const PointCloud& cloud,
                                                const CeilingFilterParams& params = {});

/// Keeps every p with z >= reference_max(p) - delta_z, preserving order.
PointCloud grid_ceiling_filter(const PointCloud& cloud, const CeilingFilterParams& params = {});

/// Plane a*x + b*y + c*z + d = 0 with a unit normal. The sign is canonical:
/// the first non-zero of (c, b, a) is positive.
struct PlaneModel {
  std::array<double, 3> normal{0.0, 0.0, 1.0};
  double d{0.0};
  std::vector<std::size_t> inliers;

  [[nodiscard]] double signed_distance(const Point3& p) const {
    return normal[0] * p.x + normal[1] * p.y + normal[2] * p.z + d;
  }
};

struct RansacParams {
  double dist_thresh{0.05};
  int max_iters{1000};
  std::uint64_t seed{0};
};

/// Largest-consensus plane over max_iters random 3-point samples, refit by
/// least squares on its inliers. Bit-reproducible for a fixed seed, and the
/// returned inlier count never decreases as max_iters grows.
/// Throws DegenerateGeometry when all points are collinear.
PlaneModel ransac_plane(const PointCloud& cloud, const RansacParams& params = {});

}  // namespace roomtrace

#endif  // ROOMTRACE_CEILING_FILTER_HPP
