// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0
//
// Room adjacency and doors: parallel edges of different rooms facing each
// other across a wall, and low-density runs of wall points between them.

#ifndef ROOMTRACE_TOPOLOGY_HPP
#define ROOMTRACE_TOPOLOGY_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "roomtrace/contour.hpp"
#include "roomtrace/density.hpp"
#include "roomtrace/ingest.hpp"

namespace roomtrace {

struct AdjacentPair {
  std::size_t room_a{0};
  std::size_t edge_a{0};
  std::size_t room_b{0};
  std::size_t edge_b{0};
  Vec2 direction;      ///< unit direction of edge_a
  double midline{0.0}; ///< mean signed offset of the two edges along the normal
  double separation{0.0};
  double t0{0.0};      ///< overlap interval along direction
  double t1{0.0};
  [[nodiscard]] double overlap() const { return t1 - t0; }
  [[nodiscard]] Vec2 normal() const { return direction.perp(); }
};

struct AdjacencyParams {
  double angle_tol{deg_to_rad(2.0)};
  double gap_tol{0.4};
  double min_overlap{0.6};
};

/// Edge pairs from different rooms that are parallel, close and overlap.
std::vector<AdjacentPair> find_adjacent_segments(std::span<const RoomContour> rooms,
                                                 const AdjacencyParams& params = {});

struct DoorSegment {
  std::string id;
  std::string room_a;
  std::string room_b;
  Vec2 p0;
  Vec2 p1;
  [[nodiscard]] double length() const { return distance(p0, p1); }
};

struct DoorParams {
  double bin_width{0.1};      ///< 2 * s
  double density_ratio{0.2};
  double min_door{0.6};
  double max_door{2.0};
  double slab_margin{0.1};    ///< added to half the edge separation
};

/// Longest run of bins below density_ratio * median(bins) whose length is
/// in [min_door, max_door], placed on the wall midline. nullopt when no run
/// qualifies or the slab is empty.
std::optional<DoorSegment> detect_door(const AdjacentPair& pair, std::span<const RoomContour> rooms,
                                       const PointCloud& cloud, const DoorParams& params = {});

struct FloorPlan {
  ProjectionFrame frame;
  std::vector<RoomContour> rooms;
  std::vector<DoorSegment> doors;
};

/// Merges duplicate doors of the same room pair with overlapping extents,
/// orders rooms and doors deterministically, assigns door ids, and rejects
/// rooms whose interiors overlap by more than tolerance.
/// Throws OverlappingRooms.
FloorPlan assemble_floorplan(const ProjectionFrame& frame, std::vector<RoomContour> rooms,
                             std::vector<DoorSegment> doors, double tolerance);

std::string floorplan_to_json(const FloorPlan& plan);
FloorPlan floorplan_from_json(const std::string& text);

}  // namespace roomtrace

#endif  // ROOMTRACE_TOPOLOGY_HPP
