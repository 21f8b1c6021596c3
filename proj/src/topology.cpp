// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "roomtrace/topology.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <numbers>

#include "roomtrace/error.hpp"

namespace roomtrace {
namespace {

namespace bg = boost::geometry;
using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint>;
using BgMulti = bg::model::multi_polygon<BgPolygon>;

BgPolygon to_boost(std::span<const Vec2> ring) {
  BgPolygon poly;
  for (const Vec2& v : ring) bg::append(poly.outer(), BgPoint(v.x, v.y));
  if (!ring.empty()) bg::append(poly.outer(), BgPoint(ring.front().x, ring.front().y));
  bg::correct(poly);
  return poly;
}

BgMulti shrink(const BgPolygon& poly, double by) {
  BgMulti out;
  bg::strategy::buffer::distance_symmetric<double> dist(-by);
  bg::strategy::buffer::side_straight side;
  bg::strategy::buffer::join_miter join;
  bg::strategy::buffer::end_flat end;
  bg::strategy::buffer::point_square point;
  bg::buffer(poly, out, dist, side, join, end, point);
  return out;
}

// Canonical unit direction with angle in [0, pi).
Vec2 canonical_direction(const Segment2& e) {
  const double a = line_angle(e.b - e.a);
  return {std::cos(a), std::sin(a)};
}

nlohmann::ordered_json point_json(const Vec2& p) { return nlohmann::ordered_json::array({p.x, p.y}); }

Vec2 point_from_json(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

std::vector<AdjacentPair> find_adjacent_segments(std::span<const RoomContour> rooms, const AdjacencyParams& params) {
  std::vector<AdjacentPair> pairs;
  for (std::size_t a = 0; a < rooms.size(); ++a) {
    const auto edges_a = ring_edges(rooms[a].polygon);
    for (std::size_t b = a + 1; b < rooms.size(); ++b) {
      const auto edges_b = ring_edges(rooms[b].polygon);
      for (std::size_t i = 0; i < edges_a.size(); ++i) {
        const Segment2& ea = edges_a[i];
        if (!(ea.length() > 0.0)) continue;
        for (std::size_t j = 0; j < edges_b.size(); ++j) {
          const Segment2& eb = edges_b[j];
          if (!(eb.length() > 0.0)) continue;
          if (line_angle_difference(line_angle(ea.b - ea.a), line_angle(eb.b - eb.a)) > params.angle_tol) continue;
          const Vec2 d = canonical_direction(ea);
          const Vec2 nrm = d.perp();
          const double off_a = nrm.dot((ea.a + ea.b) * 0.5);
          const double off_b = nrm.dot((eb.a + eb.b) * 0.5);
          const double sep = std::abs(off_a - off_b);
          if (sep > params.gap_tol) continue;
          const double a0 = std::min(d.dot(ea.a), d.dot(ea.b)), a1 = std::max(d.dot(ea.a), d.dot(ea.b));
          const double b0 = std::min(d.dot(eb.a), d.dot(eb.b)), b1 = std::max(d.dot(eb.a), d.dot(eb.b));
          const double t0 = std::max(a0, b0), t1 = std::min(a1, b1);
          if (t1 - t0 < params.min_overlap) continue;
          pairs.push_back({a, i, b, j, d, 0.5 * (off_a + off_b), sep, t0, t1});
        }
      }
    }
  }
  return pairs;
}

std::optional<DoorSegment> detect_door(const AdjacentPair& pair, std::span<const RoomContour> rooms,
                                       const PointCloud& cloud, const DoorParams& params) {
  if (!(params.bin_width > 0.0)) throw Error(ErrorCode::kInvalidArgument, "door bin width must be positive");
  const double span = pair.overlap();
  if (!(span > 0.0)) return std::nullopt;
  const auto bins = static_cast<std::size_t>(std::ceil(span / params.bin_width - 1e-9));
  std::vector<double> counts(bins, 0.0);
  const Vec2 d = pair.direction, nrm = pair.normal();
  const double half = 0.5 * pair.separation + params.slab_margin;
  for (const Point3& p : cloud) {
    const Vec2 q{p.x, p.y};
    if (std::abs(nrm.dot(q) - pair.midline) > half) continue;
    const double t = d.dot(q) - pair.t0;
    if (t < 0.0 || t > span) continue;
    const auto k = std::min(bins - 1, static_cast<std::size_t>(t / params.bin_width));
    counts[k] += 1.0;
  }
  std::vector<double> width(bins, params.bin_width);
  width.back() = span - params.bin_width * static_cast<double>(bins - 1);
  std::vector<double> density(bins);
  for (std::size_t k = 0; k < bins; ++k) density[k] = width[k] > 0.0 ? counts[k] / width[k] : 0.0;

  std::vector<double> sorted = density;
  std::sort(sorted.begin(), sorted.end());
  const double median = bins % 2 == 1 ? sorted[bins / 2] : 0.5 * (sorted[bins / 2 - 1] + sorted[bins / 2]);
  if (!(median > 0.0)) {
    spdlog::warn("rooms {} and {}: no wall points between adjacent edges; suspicious adjacency",
                 rooms[pair.room_a].id, rooms[pair.room_b].id);
    return std::nullopt;
  }

  const double cutoff = params.density_ratio * median;
  double best_len = -1.0, best_t0 = 0.0, best_t1 = 0.0;
  for (std::size_t k = 0; k < bins;) {
    if (density[k] >= cutoff) {
      ++k;
      continue;
    }
    std::size_t e = k;
    double len = 0.0;
    while (e < bins && density[e] < cutoff) len += width[e++];
    if (len >= params.min_door && len <= params.max_door && len > best_len) {
      best_len = len;
      best_t0 = params.bin_width * static_cast<double>(k);
      best_t1 = best_t0 + len;
    }
    k = e;
  }
  if (best_len < 0.0) return std::nullopt;

  DoorSegment door;
  door.room_a = rooms[pair.room_a].id;
  door.room_b = rooms[pair.room_b].id;
  door.p0 = d * (pair.t0 + best_t0) + nrm * pair.midline;
  door.p1 = d * (pair.t0 + best_t1) + nrm * pair.midline;
  return door;
}

FloorPlan assemble_floorplan(const ProjectionFrame& frame, std::vector<RoomContour> rooms,
                             std::vector<DoorSegment> doors, double tolerance) {
  FloorPlan plan;
  plan.frame = frame;

  std::vector<BgMulti> shrunk;
  for (const RoomContour& r : rooms) shrunk.push_back(shrink(to_boost(r.polygon), tolerance));
  for (std::size_t a = 0; a < rooms.size(); ++a) {
    for (std::size_t b = a + 1; b < rooms.size(); ++b) {
      if (bg::intersects(shrunk[a], shrunk[b])) {
        throw Error(ErrorCode::kOverlappingRooms,
                    "rooms " + rooms[a].id + " and " + rooms[b].id + " overlap beyond tolerance");
      }
    }
  }

  for (DoorSegment& door : doors) {
    if (door.room_a > door.room_b) std::swap(door.room_a, door.room_b);
    const bool a_known = std::any_of(rooms.begin(), rooms.end(), [&](const RoomContour& r) { return r.id == door.room_a; });
    const bool b_known = std::any_of(rooms.begin(), rooms.end(), [&](const RoomContour& r) { return r.id == door.room_b; });
    if (!a_known || !b_known || door.room_a == door.room_b) {
      throw Error(ErrorCode::kInvalidArgument, "door references unknown or identical rooms");
    }
    // Endpoints ordered along the door direction.
    if (door.p1.x < door.p0.x || (door.p1.x == door.p0.x && door.p1.y < door.p0.y)) std::swap(door.p0, door.p1);
  }
  std::stable_sort(doors.begin(), doors.end(), [](const DoorSegment& x, const DoorSegment& y) {
    if (x.room_a != y.room_a) return x.room_a < y.room_a;
    if (x.room_b != y.room_b) return x.room_b < y.room_b;
    if (x.p0.x != y.p0.x) return x.p0.x < y.p0.x;
    return x.p0.y < y.p0.y;
  });

  for (const DoorSegment& door : doors) {
    if (!plan.doors.empty()) {
      DoorSegment& last = plan.doors.back();
      if (last.room_a == door.room_a && last.room_b == door.room_b) {
        const Vec2 dir = (last.p1 - last.p0) / std::max(last.length(), 1e-12);
        const double l0 = 0.0, l1 = last.length();
        const double d0 = dir.dot(door.p0 - last.p0), d1 = dir.dot(door.p1 - last.p0);
        if (std::max(d0, d1) >= l0 && std::min(d0, d1) <= l1) {
          const double lo = std::min({l0, d0, d1}), hi = std::max({l1, d0, d1});
          const Vec2 origin = last.p0;
          last.p0 = origin + dir * lo;
          last.p1 = origin + dir * hi;
          continue;
        }
      }
    }
    plan.doors.push_back(door);
  }
  for (std::size_t k = 0; k < plan.doors.size(); ++k) {
    char id[16];
    std::snprintf(id, sizeof id, "door_%03zu", k);
    plan.doors[k].id = id;
  }
  plan.rooms = std::move(rooms);
  return plan;
}

std::string floorplan_to_json(const FloorPlan& plan) {
  nlohmann::ordered_json j;
  j["frame"] = nlohmann::ordered_json::parse(frame_to_json(plan.frame));
  j["rooms"] = nlohmann::ordered_json::array();
  for (const RoomContour& r : plan.rooms) {
    nlohmann::ordered_json room;
    room["id"] = r.id;
    room["theta_main"] = r.theta_main;
    room["regularized"] = r.regularized;
    room["snapped_vertices"] = r.snapped_vertices;
    room["polygon"] = nlohmann::ordered_json::array();
    for (const Vec2& v : r.polygon) room["polygon"].push_back(point_json(v));
    j["rooms"].push_back(std::move(room));
  }
  j["doors"] = nlohmann::ordered_json::array();
  for (const DoorSegment& d : plan.doors) {
    nlohmann::ordered_json door;
    door["id"] = d.id;
    door["rooms"] = nlohmann::ordered_json::array({d.room_a, d.room_b});
    door["p0"] = point_json(d.p0);
    door["p1"] = point_json(d.p1);
    j["doors"].push_back(std::move(door));
  }
  return j.dump(2) + "\n";
}

FloorPlan floorplan_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    FloorPlan plan;
    plan.frame = frame_from_json(j.at("frame").dump());
    for (const auto& r : j.at("rooms")) {
      RoomContour room;
      room.id = r.at("id").get<std::string>();
      room.theta_main = r.value("theta_main", 0.0);
      room.regularized = r.value("regularized", true);
      room.snapped_vertices = r.value("snapped_vertices", 0);
      for (const auto& v : r.at("polygon")) room.polygon.push_back(point_from_json(v));
      plan.rooms.push_back(std::move(room));
    }
    for (const auto& d : j.at("doors")) {
      DoorSegment door;
      door.id = d.value("id", std::string());
      door.room_a = d.at("rooms").at(0).get<std::string>();
      door.room_b = d.at("rooms").at(1).get<std::string>();
      door.p0 = point_from_json(d.at("p0"));
      door.p1 = point_from_json(d.at("p1"));
      plan.doors.push_back(std::move(door));
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kDecodeFailure, std::string("floorplan.json: ") + e.what());
  }
}

}  // namespace roomtrace
