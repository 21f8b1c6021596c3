// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0
//
// Room outline extraction: angular-gap boundary points, Moore border
// tracing, closed-curve RDP, main-direction regularization and the
// point-cloud correction that moves walls onto boundary evidence.

#ifndef ROOMTRACE_CONTOUR_HPP
#define ROOMTRACE_CONTOUR_HPP

#include <span>
#include <string>
#include <vector>

#include "roomtrace/density.hpp"
#include "roomtrace/geometry.hpp"
#include "roomtrace/segmentation.hpp"

namespace roomtrace {

struct BoundaryPointSet {
  std::vector<Vec2> points;
  double radius{0.2};
  double sector_rad{0.0};
};

/// flags[i] is true when the neighbours of points[i] within radius (at
/// positive distance) leave a circular azimuth gap >= sector_rad, or when
/// it has no such neighbours.
std::vector<bool> boundary_flags(std::span<const Vec2> points, double radius, double sector_rad);

/// Throws TooFewPoints for fewer than two points, InvalidArgument for a
/// non-positive radius or a sector outside (0, 2*pi).
BoundaryPointSet extract_boundary_points(std::span<const Vec2> points, double radius = 0.2,
                                         double sector_rad = deg_to_rad(30.0));

/// Outer border of a single 4-connected component in pixel coordinates
/// (m, n), clockwise on screen (row 0 at the top), starting at the first
/// foreground pixel in row-major order. Throws MultipleComponents.
std::vector<Vec2> trace_mask_contour(const ByteRaster& mask);

/// Pixel centres to world meters.
std::vector<Vec2> pixels_to_world(std::span<const Vec2> pixels, const ProjectionFrame& frame);

/// Open-chain Ramer-Douglas-Peucker; endpoints always kept.
std::vector<Vec2> rdp_open(std::span<const Vec2> chain, double epsilon);

/// Closed-ring RDP split at the two mutually farthest vertices.
std::vector<Vec2> rdp_simplify(std::span<const Vec2> ring, double epsilon);

/// max(2 * s, 0.5 * spacing).
inline double dynamic_epsilon(double pixel_size, double spacing) {
  return std::max(2.0 * pixel_size, 0.5 * spacing);
}

/// Among the longest max(4, ceil(0.2 * n)) edges, the one closest to an axis
/// (ties to the longer, then the earlier); its angle folded into [0, pi/2).
double main_direction(std::span<const Vec2> ring);

/// Rectilinear ring: line k has class cls[k] (0 along theta, 1 across) and
/// signed offset along its normal. Classes alternate around the ring and
/// vertex k is the intersection of lines k-1 and k.
struct RectilinearRing {
  double theta{0.0};
  std::vector<int> cls;
  std::vector<double> offset;

  [[nodiscard]] std::size_t size() const noexcept { return cls.size(); }
  [[nodiscard]] Vec2 direction(int c) const;
  [[nodiscard]] Vec2 normal(int c) const;
  [[nodiscard]] std::vector<Vec2> vertices() const;
};

struct RegularizeParams {
  double merge_tol{0.1};     ///< offset gap / edge length merged away (2 * s)
  double skip_angle{deg_to_rad(20.0)};
  double skip_fraction{0.3};
};

struct RegularizeResult {
  RectilinearRing ring;
  std::vector<Vec2> polygon;
  bool regularized{true};  ///< false when the room was left as traced
};

/// Snaps every edge to theta or theta + 90 degrees. Rooms whose edge length
/// deviates by more than skip_angle from both axes for more than
/// skip_fraction of the perimeter are returned unchanged.
/// Throws DegenerateAfterMerge when fewer than four lines survive.
RegularizeResult regularize(std::span<const Vec2> ring, double theta, const RegularizeParams& params = {});

enum class CorrectionMode { kPerEdge, kPerVertex };

struct FuseParams {
  double tau{0.05};
  double band{0.3};  ///< half-width of the strip searched for wall evidence
  CorrectionMode mode{CorrectionMode::kPerEdge};
};

struct FuseResult {
  RectilinearRing ring;
  std::vector<Vec2> polygon;
  int snapped_vertices{0};
  std::vector<double> edge_shift;  ///< per-line offset change
};

/// Moves lines whose two end vertices are farther than tau from every
/// boundary point onto a robust offset of the boundary evidence near them.
/// Edges are only translated, so the ring stays rectilinear.
FuseResult fuse_correct(const RectilinearRing& ring, const BoundaryPointSet& boundary,
                        const FuseParams& params = {});

struct RoomContour {
  std::string id;
  std::vector<Vec2> polygon;
  double theta_main{0.0};
  bool regularized{true};
  int snapped_vertices{0};
};

struct ContourParams {
  double rdp_epsilon{0.0};  ///< <= 0 selects dynamic_epsilon
  RegularizeParams regularize{};
  FuseParams fuse{};
  double boundary_radius{0.2};
  double boundary_sector_deg{30.0};
};

/// Debug stages of one room, all in meters.
struct ContourTrace {
  std::vector<Vec2> raw;
  std::vector<Vec2> simplified;
  std::vector<Vec2> regularized;
  std::vector<Vec2> final_polygon;
};

/// Full per-room chain from mask to corrected polygon.
RoomContour extract_room_contour(const MaskImage& mask, const ProjectionFrame& frame,
                                 const BoundaryPointSet& boundary, double spacing,
                                 const ContourParams& params, ContourTrace* trace = nullptr);

}  // namespace roomtrace

#endif  // ROOMTRACE_CONTOUR_HPP
