// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0
//
// Evaluation against ground truth: room matching by overlap ratio and
// boundary precision / recall by endpoint distance.

#ifndef ROOMTRACE_EVAL_HPP
#define ROOMTRACE_EVAL_HPP

#include <span>
#include <string>
#include <vector>

#include "roomtrace/density.hpp"
#include "roomtrace/geometry.hpp"
#include "roomtrace/raster.hpp"
#include "roomtrace/topology.hpp"

namespace roomtrace {

struct GroundTruthDoor {
  std::size_t room_a{0};  ///< indices into GroundTruth::rooms
  std::size_t room_b{0};
  Segment2 segment;
};

struct GroundTruth {
  std::vector<std::vector<Vec2>> rooms;
  std::vector<Segment2> boundaries;
  std::vector<GroundTruthDoor> doors;
};

/// {"rooms": [[[x, y], ...], ...], "boundaries": [[[x0, y0], [x1, y1]], ...],
///  "doors": [{"rooms": [a, b], "segment": [[x0, y0], [x1, y1]]}, ...]}
/// "doors" is optional on input.
std::string ground_truth_to_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(const std::string& text);

/// Pixels whose centre lies inside the ring (even-odd rule) are set to 1.
ByteRaster rasterize_polygon(std::span<const Vec2> ring, const ProjectionFrame& frame);

struct RoomMatch {
  std::size_t pred{0};
  std::size_t gt{0};
  double ratio{0.0};
  friend bool operator==(const RoomMatch&, const RoomMatch&) = default;
};

struct RoomMatchResult {
  std::size_t room_true{0};
  std::vector<RoomMatch> assignment;
};

/// Greedy one-to-one matching by descending |pred & gt| / |gt|; a pair
/// qualifies when the ratio exceeds overlap_thresh. Throws FrameMismatch.
RoomMatchResult match_rooms(std::span<const ByteRaster> pred, std::span<const ByteRaster> gt,
                            double overlap_thresh = 0.95);

/// Larger endpoint distance under the better of the two endpoint pairings.
double segment_pair_distance(const Segment2& a, const Segment2& b);

struct SegmentMatch {
  std::size_t pred{0};
  std::size_t gt{0};
  double distance{0.0};
};

struct BoundaryMatchResult {
  std::size_t boundary_true{0};
  std::size_t boundary_all{0};
  std::size_t boundary_gt{0};
  double precision{0.0};
  double recall{0.0};
  bool empty_prediction{false};
  std::vector<SegmentMatch> matches;
};

struct PrecisionRecall {
  double precision{0.0};
  double recall{0.0};
};

/// precision = true / all, recall = true / gt; a zero denominator gives 0.
PrecisionRecall boundary_precision_recall(std::size_t boundary_true, std::size_t boundary_all,
                                          std::size_t boundary_gt);

/// Greedy one-to-one matching by ascending segment_pair_distance; pairs
/// match when that distance is <= endpoint_tol. Throws EmptyGroundTruth.
BoundaryMatchResult match_boundaries(std::span<const Segment2> pred, std::span<const Segment2> gt,
                                     double endpoint_tol = 0.005);

struct DoorMatch {
  std::size_t pred{0};  ///< index into FloorPlan::doors
  std::size_t gt{0};
  double distance{0.0};
};

struct DoorMatchResult {
  std::size_t door_true{0};
  std::size_t door_all{0};
  std::size_t door_gt{0};
  std::vector<DoorMatch> matches;
};

/// A predicted door matches a truth door when its rooms map onto the truth
/// door's rooms through room_assignment and segment_pair_distance <= tol.
/// Greedy one-to-one by ascending distance.
DoorMatchResult match_doors(const FloorPlan& plan, const GroundTruth& gt, std::span<const RoomMatch> room_assignment,
                            double tol);

struct EvalParams {
  double overlap_thresh{0.95};
  double endpoint_tol{0.005};
  double door_tol{0.2};
};

struct EvalReport {
  std::size_t room_true{0};
  std::size_t room_all{0};
  std::size_t room_gt{0};
  std::vector<RoomMatch> room_assignment;
  BoundaryMatchResult boundaries;
  DoorMatchResult doors;
};

/// Rooms are rasterized at the plan's frame; predicted boundaries are the
/// edges of every room polygon.
EvalReport evaluate(const FloorPlan& plan, const GroundTruth& gt, const EvalParams& params = {});

std::string eval_report_to_json(const EvalReport& report, const FloorPlan& plan);

}  // namespace roomtrace

#endif  // ROOMTRACE_EVAL_HPP
