// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "roomtrace/eval.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <optional>
#include <json.hpp>

#include "roomtrace/error.hpp"

namespace roomtrace {
namespace {

nlohmann::ordered_json point_json(const Vec2& p) { return nlohmann::ordered_json::array({p.x, p.y}); }

Vec2 point_from_json(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

std::string ground_truth_to_json(const GroundTruth& gt) {
  nlohmann::ordered_json j;
  j["rooms"] = nlohmann::ordered_json::array();
  for (const auto& ring : gt.rooms) {
    auto r = nlohmann::ordered_json::array();
    for (const Vec2& v : ring) r.push_back(point_json(v));
    j["rooms"].push_back(std::move(r));
  }
  j["boundaries"] = nlohmann::ordered_json::array();
  for (const Segment2& s : gt.boundaries) {
    j["boundaries"].push_back(nlohmann::ordered_json::array({point_json(s.a), point_json(s.b)}));
  }
  j["doors"] = nlohmann::ordered_json::array();
  for (const GroundTruthDoor& d : gt.doors) {
    nlohmann::ordered_json door;
    door["rooms"] = nlohmann::ordered_json::array({d.room_a, d.room_b});
    door["segment"] = nlohmann::ordered_json::array({point_json(d.segment.a), point_json(d.segment.b)});
    j["doors"].push_back(std::move(door));
  }
  return j.dump(2) + "\n";
}

GroundTruth ground_truth_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    GroundTruth gt;
    for (const auto& r : j.at("rooms")) {
      std::vector<Vec2> ring;
      for (const auto& v : r) ring.push_back(point_from_json(v));
      gt.rooms.push_back(std::move(ring));
    }
    for (const auto& s : j.at("boundaries")) gt.boundaries.push_back({point_from_json(s.at(0)), point_from_json(s.at(1))});
    if (j.contains("doors")) {
      for (const auto& d : j.at("doors")) {
        GroundTruthDoor door;
        door.room_a = d.at("rooms").at(0).get<std::size_t>();
        door.room_b = d.at("rooms").at(1).get<std::size_t>();
        door.segment = {point_from_json(d.at("segment").at(0)), point_from_json(d.at("segment").at(1))};
        if (door.room_a >= gt.rooms.size() || door.room_b >= gt.rooms.size()) {
          throw Error(ErrorCode::kDecodeFailure, "gt.json: door references unknown room");
        }
        gt.doors.push_back(door);
      }
    }
    return gt;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kDecodeFailure, std::string("gt.json: ") + e.what());
  }
}

ByteRaster rasterize_polygon(std::span<const Vec2> ring, const ProjectionFrame& frame) {
  ByteRaster out(frame.width, frame.height, 0);
  if (ring.size() < 3) return out;
  for (int n = 0; n < frame.height; ++n) {
    for (int m = 0; m < frame.width; ++m) {
      if (point_in_polygon(frame.pixel_center(m, n), ring)) out.at(m, n) = 1;
    }
  }
  return out;
}

RoomMatchResult match_rooms(std::span<const ByteRaster> pred, std::span<const ByteRaster> gt, double overlap_thresh) {
  for (const auto& r : pred) {
    for (const auto& g : gt) {
      if (!r.same_shape(g)) throw Error(ErrorCode::kFrameMismatch, "prediction and ground truth rasters differ in size");
    }
  }
  std::vector<RoomMatch> candidates;
  for (std::size_t g = 0; g < gt.size(); ++g) {
    std::size_t gt_area = 0;
    for (std::uint8_t v : gt[g].data()) gt_area += v ? 1 : 0;
    if (gt_area == 0) continue;
    for (std::size_t p = 0; p < pred.size(); ++p) {
      std::size_t inter = 0;
      for (std::size_t i = 0; i < gt[g].size(); ++i) inter += (gt[g].data()[i] && pred[p].data()[i]) ? 1 : 0;
      const double ratio = static_cast<double>(inter) / static_cast<double>(gt_area);
      if (ratio > overlap_thresh) candidates.push_back({p, g, ratio});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const RoomMatch& a, const RoomMatch& b) {
    if (a.ratio != b.ratio) return a.ratio > b.ratio;
    if (a.pred != b.pred) return a.pred < b.pred;
    return a.gt < b.gt;
  });
  RoomMatchResult out;
  std::vector<bool> pred_used(pred.size(), false), gt_used(gt.size(), false);
  for (const RoomMatch& c : candidates) {
    if (pred_used[c.pred] || gt_used[c.gt]) continue;
    pred_used[c.pred] = gt_used[c.gt] = true;
    out.assignment.push_back(c);
  }
  out.room_true = out.assignment.size();
  return out;
}

double segment_pair_distance(const Segment2& a, const Segment2& b) {
  const double straight = std::max(distance(a.a, b.a), distance(a.b, b.b));
  const double crossed = std::max(distance(a.a, b.b), distance(a.b, b.a));
  return std::min(straight, crossed);
}

PrecisionRecall boundary_precision_recall(std::size_t boundary_true, std::size_t boundary_all,
                                          std::size_t boundary_gt) {
  PrecisionRecall pr;
  if (boundary_all > 0) pr.precision = static_cast<double>(boundary_true) / static_cast<double>(boundary_all);
  if (boundary_gt > 0) pr.recall = static_cast<double>(boundary_true) / static_cast<double>(boundary_gt);
  return pr;
}

BoundaryMatchResult match_boundaries(std::span<const Segment2> pred, std::span<const Segment2> gt,
                                     double endpoint_tol) {
  if (gt.empty()) throw Error(ErrorCode::kEmptyGroundTruth, "ground truth has no boundary segments");
  BoundaryMatchResult out;
  out.boundary_all = pred.size();
  out.boundary_gt = gt.size();
  out.empty_prediction = pred.empty();
  if (out.empty_prediction) spdlog::warn("no predicted boundary segments; precision reported as 0");

  std::vector<SegmentMatch> candidates;
  for (std::size_t p = 0; p < pred.size(); ++p) {
    for (std::size_t g = 0; g < gt.size(); ++g) {
      const double d = segment_pair_distance(pred[p], gt[g]);
      if (d <= endpoint_tol) candidates.push_back({p, g, d});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const SegmentMatch& a, const SegmentMatch& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.pred != b.pred) return a.pred < b.pred;
    return a.gt < b.gt;
  });
  std::vector<bool> pred_used(pred.size(), false), gt_used(gt.size(), false);
  for (const SegmentMatch& c : candidates) {
    if (pred_used[c.pred] || gt_used[c.gt]) continue;
    pred_used[c.pred] = gt_used[c.gt] = true;
    out.matches.push_back(c);
  }
  out.boundary_true = out.matches.size();
  const auto pr = boundary_precision_recall(out.boundary_true, out.boundary_all, out.boundary_gt);
  out.precision = pr.precision;
  out.recall = pr.recall;
  return out;
}

DoorMatchResult match_doors(const FloorPlan& plan, const GroundTruth& gt, std::span<const RoomMatch> room_assignment,
                            double tol) {
  DoorMatchResult out;
  out.door_all = plan.doors.size();
  out.door_gt = gt.doors.size();
  auto gt_index_of = [&](const std::string& room_id) -> std::optional<std::size_t> {
    for (const RoomMatch& m : room_assignment) {
      if (plan.rooms[m.pred].id == room_id) return m.gt;
    }
    return std::nullopt;
  };
  std::vector<DoorMatch> candidates;
  for (std::size_t p = 0; p < plan.doors.size(); ++p) {
    const auto ga = gt_index_of(plan.doors[p].room_a), gb = gt_index_of(plan.doors[p].room_b);
    if (!ga || !gb) continue;
    for (std::size_t g = 0; g < gt.doors.size(); ++g) {
      const GroundTruthDoor& t = gt.doors[g];
      const bool same = (t.room_a == *ga && t.room_b == *gb) || (t.room_a == *gb && t.room_b == *ga);
      if (!same) continue;
      const double d = segment_pair_distance({plan.doors[p].p0, plan.doors[p].p1}, t.segment);
      if (d <= tol) candidates.push_back({p, g, d});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const DoorMatch& a, const DoorMatch& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.pred != b.pred) return a.pred < b.pred;
    return a.gt < b.gt;
  });
  std::vector<bool> pred_used(plan.doors.size(), false), gt_used(gt.doors.size(), false);
  for (const DoorMatch& c : candidates) {
    if (pred_used[c.pred] || gt_used[c.gt]) continue;
    pred_used[c.pred] = gt_used[c.gt] = true;
    out.matches.push_back(c);
  }
  out.door_true = out.matches.size();
  return out;
}

EvalReport evaluate(const FloorPlan& plan, const GroundTruth& gt, const EvalParams& params) {
  if (gt.rooms.empty() && gt.boundaries.empty()) {
    throw Error(ErrorCode::kEmptyGroundTruth, "ground truth has no rooms and no boundaries");
  }
  EvalReport report;
  std::vector<ByteRaster> pred_masks, gt_masks;
  for (const RoomContour& r : plan.rooms) pred_masks.push_back(rasterize_polygon(r.polygon, plan.frame));
  for (const auto& ring : gt.rooms) gt_masks.push_back(rasterize_polygon(ring, plan.frame));
  const RoomMatchResult rooms = match_rooms(pred_masks, gt_masks, params.overlap_thresh);
  report.room_true = rooms.room_true;
  report.room_all = plan.rooms.size();
  report.room_gt = gt.rooms.size();
  report.room_assignment = rooms.assignment;

  std::vector<Segment2> pred_segments;
  for (const RoomContour& r : plan.rooms) {
    const auto edges = ring_edges(r.polygon);
    pred_segments.insert(pred_segments.end(), edges.begin(), edges.end());
  }
  report.boundaries = match_boundaries(pred_segments, gt.boundaries, params.endpoint_tol);
  report.doors = match_doors(plan, gt, report.room_assignment, params.door_tol);
  return report;
}

std::string eval_report_to_json(const EvalReport& report, const FloorPlan& plan) {
  nlohmann::ordered_json j;
  j["room_true"] = report.room_true;
  j["room_all"] = report.room_all;
  j["room_gt"] = report.room_gt;
  j["room_matches"] = nlohmann::ordered_json::array();
  for (const RoomMatch& m : report.room_assignment) {
    j["room_matches"].push_back({{"pred", plan.rooms[m.pred].id}, {"gt", m.gt}, {"ratio", m.ratio}});
  }
  const BoundaryMatchResult& b = report.boundaries;
  j["boundary_true"] = b.boundary_true;
  j["boundary_all"] = b.boundary_all;
  j["boundary_gt"] = b.boundary_gt;
  j["precision_boundary"] = b.precision;
  j["recall_boundary"] = b.recall;
  j["empty_prediction"] = b.empty_prediction;
  j["segment_matches"] = nlohmann::ordered_json::array();
  for (const SegmentMatch& m : b.matches) {
    j["segment_matches"].push_back({{"pred", m.pred}, {"gt", m.gt}, {"distance", m.distance}});
  }
  j["door_true"] = report.doors.door_true;
  j["door_all"] = report.doors.door_all;
  j["door_gt"] = report.doors.door_gt;
  j["door_matches"] = nlohmann::ordered_json::array();
  for (const DoorMatch& m : report.doors.matches) {
    j["door_matches"].push_back({{"pred", plan.doors[m.pred].id}, {"gt", m.gt}, {"distance", m.distance}});
  }
  return j.dump(2) + "\n";
}

}  // namespace roomtrace
