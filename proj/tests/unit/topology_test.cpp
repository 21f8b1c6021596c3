// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "roomtrace/topology.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "roomtrace/error.hpp"
#include "support.hpp"

namespace roomtrace {
namespace {

using testing::Rng;
using testing::thrown_code;

RoomContour box(const std::string& id, double x0, double y0, double x1, double y1) {
  RoomContour r;
  r.id = id;
  r.polygon = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  return r;
}

// Wall between x = 4.0 and 4.2, y in [0, 3], with an opening [gap0, gap1).
PointCloud wall_cloud(Rng& rng, double gap0, double gap1) {
  std::vector<Point3> pts;
  while (pts.size() < 3000) {
    const double y = testing::uniform(rng, 0.0, 3.0);
    if (y >= gap0 && y < gap1) continue;
    pts.push_back({testing::uniform(rng, 4.0, 4.2), y, testing::uniform(rng, 0.0, 2.1)});
  }
  return PointCloud(pts);
}

TEST(Adjacency, SideBySideRooms) {
  const std::vector<RoomContour> rooms{box("a", 0, 0, 4, 3), box("b", 4.2, 0, 8, 3)};
  const auto pairs = find_adjacent_segments(rooms);
  ASSERT_EQ(pairs.size(), 1u);
  const AdjacentPair& p = pairs[0];
  EXPECT_EQ(p.room_a, 0u);
  EXPECT_EQ(p.room_b, 1u);
  EXPECT_NEAR(p.separation, 0.2, 1e-12);
  EXPECT_NEAR(p.overlap(), 3.0, 1e-12);
  EXPECT_NEAR(std::abs(p.midline), 4.1, 1e-12);
}

TEST(Adjacency, FarOrShortOverlapIgnored) {
  EXPECT_TRUE(find_adjacent_segments(std::vector<RoomContour>{box("a", 0, 0, 4, 3), box("b", 5, 0, 8, 3)}).empty());
  EXPECT_TRUE(find_adjacent_segments(std::vector<RoomContour>{box("a", 0, 0, 4, 3), box("b", 4.2, 2.6, 8, 6)}).empty());
}

TEST(Door, GapFoundWithinTwoBins) {
  Rng rng(1);
  const std::vector<RoomContour> rooms{box("a", 0, 0, 4, 3), box("b", 4.2, 0, 8, 3)};
  const auto pairs = find_adjacent_segments(rooms);
  ASSERT_EQ(pairs.size(), 1u);
  const auto door = detect_door(pairs[0], rooms, wall_cloud(rng, 1.0, 1.9), {});
  ASSERT_TRUE(door);
  EXPECT_NEAR(door->length(), 0.9, 0.2);
  EXPECT_NEAR(door->p0.x, 4.1, 1e-9);
  EXPECT_NEAR(std::min(door->p0.y, door->p1.y), 1.0, 0.2);
  EXPECT_NEAR(std::max(door->p0.y, door->p1.y), 1.9, 0.2);
}

TEST(Door, DenseWallHasNone) {
  Rng rng(2);
  const std::vector<RoomContour> rooms{box("a", 0, 0, 4, 3), box("b", 4.2, 0, 8, 3)};
  const auto pairs = find_adjacent_segments(rooms);
  EXPECT_FALSE(detect_door(pairs[0], rooms, wall_cloud(rng, 0.0, 0.0), {}));
}

TEST(Door, NarrowGapIsNotADoor) {
  Rng rng(3);
  const std::vector<RoomContour> rooms{box("a", 0, 0, 4, 3), box("b", 4.2, 0, 8, 3)};
  const auto pairs = find_adjacent_segments(rooms);
  EXPECT_FALSE(detect_door(pairs[0], rooms, wall_cloud(rng, 1.0, 1.3), {}));
}

TEST(DoorProperty, RecoveredAcrossPositionsAndWidths) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const double width = testing::uniform(rng, 0.7, 1.5);
    const double start = testing::uniform(rng, 0.2, 2.8 - width);
    const std::vector<RoomContour> rooms{box("a", 0, 0, 4, 3), box("b", 4.2, 0, 8, 3)};
    const auto pairs = find_adjacent_segments(rooms);
    const auto door = detect_door(pairs[0], rooms, wall_cloud(rng, start, start + width), {});
    ASSERT_TRUE(door) << "seed " << seed;
    EXPECT_NEAR(std::min(door->p0.y, door->p1.y), start, 0.2) << "seed " << seed;
    EXPECT_NEAR(std::max(door->p0.y, door->p1.y), start + width, 0.2) << "seed " << seed;
  }
}

TEST(Assemble, DuplicateDoorsMergeAndIdsAssigned) {
  const std::vector<RoomContour> rooms{box("a", 0, 0, 4, 3), box("b", 4.2, 0, 8, 3)};
  std::vector<DoorSegment> doors{{"", "b", "a", {4.1, 1.5}, {4.1, 1.0}}, {"", "a", "b", {4.1, 1.4}, {4.1, 2.0}}};
  const FloorPlan plan = assemble_floorplan({}, rooms, doors, 0.05);
  ASSERT_EQ(plan.doors.size(), 1u);
  const DoorSegment& d = plan.doors[0];
  EXPECT_EQ(d.id, "door_000");
  EXPECT_EQ(d.room_a, "a");
  EXPECT_EQ(d.room_b, "b");
  EXPECT_NEAR(d.p0.y, 1.0, 1e-12);
  EXPECT_NEAR(d.p1.y, 2.0, 1e-12);
}

TEST(Assemble, SeparateDoorsKept) {
  const std::vector<RoomContour> rooms{box("a", 0, 0, 4, 3), box("b", 4.2, 0, 8, 3)};
  std::vector<DoorSegment> doors{{"", "a", "b", {4.1, 2.0}, {4.1, 2.8}}, {"", "a", "b", {4.1, 0.1}, {4.1, 0.9}}};
  const FloorPlan plan = assemble_floorplan({}, rooms, doors, 0.05);
  ASSERT_EQ(plan.doors.size(), 2u);
  EXPECT_LT(plan.doors[0].p0.y, plan.doors[1].p0.y);
  EXPECT_EQ(plan.doors[1].id, "door_001");
}

TEST(Assemble, OverlapAndUnknownRoomRejected) {
  const std::vector<RoomContour> overlapping{box("a", 0, 0, 4, 3), box("b", 3, 0, 8, 3)};
  EXPECT_EQ(thrown_code([&] { assemble_floorplan({}, overlapping, {}, 0.05); }), ErrorCode::kOverlappingRooms);
  const std::vector<RoomContour> touching{box("a", 0, 0, 4, 3), box("b", 3.98, 0, 8, 3)};
  EXPECT_EQ(assemble_floorplan({}, touching, {}, 0.05).rooms.size(), 2u);
  const std::vector<RoomContour> rooms{box("a", 0, 0, 4, 3), box("b", 4.2, 0, 8, 3)};
  const std::vector<DoorSegment> bad{{"", "a", "zz", {4.1, 1}, {4.1, 2}}};
  EXPECT_EQ(thrown_code([&] { assemble_floorplan({}, rooms, bad, 0.05); }), ErrorCode::kInvalidArgument);
}

TEST(FloorPlanJson, RoundTrip) {
  std::vector<RoomContour> rooms{box("a", 0, 0, 4, 3), box("b", 4.2, 0, 8, 3)};
  rooms[1].theta_main = 0.25;
  rooms[1].regularized = false;
  rooms[1].snapped_vertices = 2;
  const FloorPlan plan = assemble_floorplan({0.0, 0.0, 0.05, 160, 60}, rooms,
                                            {{"", "a", "b", {4.1, 1.0}, {4.1, 1.9}}}, 0.05);
  const std::string text = floorplan_to_json(plan);
  const FloorPlan back = floorplan_from_json(text);
  EXPECT_EQ(floorplan_to_json(back), text);
  EXPECT_EQ(back.frame, plan.frame);
  ASSERT_EQ(back.rooms.size(), 2u);
  EXPECT_EQ(back.rooms[1].polygon, plan.rooms[1].polygon);
  EXPECT_FALSE(back.rooms[1].regularized);
  EXPECT_EQ(back.doors[0].p1, plan.doors[0].p1);
}

}  // namespace
}  // namespace roomtrace
