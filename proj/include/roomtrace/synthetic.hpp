// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic indoor scenes for tests: axis-aligned rectangular rooms
// separated by walls of a given thickness, doors carved into shared walls
// below the door height, optionally rotated as a whole.
//
// Every room contributes a ceiling at ceiling_height, a floor at 0 and four
// inner wall faces. Points are allocated to surfaces in proportion to
// weight * area (largest remainder), so total_points is exact.

#ifndef ROOMTRACE_SYNTHETIC_HPP
#define ROOMTRACE_SYNTHETIC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "roomtrace/eval.hpp"
#include "roomtrace/ingest.hpp"

namespace roomtrace {

struct SceneRoom {
  std::string id;
  Vec2 min;  ///< interior rectangle
  Vec2 max;
};

struct SceneDoor {
  std::size_t room_a{0};
  std::size_t room_b{0};
  double lo{0.0};  ///< interval along the shared wall (x or y, unrotated)
  double hi{0.0};
};

struct SurfaceWeights {
  double ceiling{0.6};
  double floor{0.1};
  double wall{20.0};
};

/// kUniform draws independent uniform points per surface. kLowDiscrepancy
/// walks the R2 additive recurrence from a random start, so every
/// sub-rectangle of a surface receives close to its expected share.
enum class SurfaceSampling { kUniform, kLowDiscrepancy };

struct SyntheticScene {
  std::vector<SceneRoom> rooms;
  std::vector<SceneDoor> doors;
  double wall_thickness{0.2};
  double ceiling_height{2.8};
  double door_height{2.1};
  SurfaceWeights weights{};
  std::size_t total_points{50000};
  double noise_sigma{0.01};
  SurfaceSampling sampling{SurfaceSampling::kLowDiscrepancy};
  double rotation_deg{0.0};  ///< about the origin, applied last
  std::uint64_t seed{0};
};

struct SyntheticResult {
  PointCloud cloud;
  GroundTruth truth;  ///< room rings, one boundary per room edge, doors on wall midlines
};

/// Throws InvalidLayout: degenerate or overlapping rooms, doors whose rooms
/// share no wall, door intervals outside the shared span, door_height not
/// below ceiling_height, non-positive total or negative weights.
void validate_scene(const SyntheticScene& scene);

SyntheticResult generate_synthetic(const SyntheticScene& scene);

/// "one_room", "two_room", "three_room", "four_room". Throws InvalidArgument.
SyntheticScene builtin_scene(const std::string& name);
std::vector<std::string> builtin_scene_names();

/// {"rooms": [{"id", "min": [x, y], "max": [x, y]}], "doors": [{"rooms": [ida, idb],
///  "interval": [lo, hi]}], "wall_thickness", "ceiling_height", "door_height",
///  "weights": {"ceiling", "floor", "wall"}, "total_points", "noise_sigma",
///  "sampling": "uniform" | "low_discrepancy", "rotation_deg", "seed"}; every key except rooms is optional.
SyntheticScene scene_from_json(const std::string& text);
std::string scene_to_json(const SyntheticScene& scene);

}  // namespace roomtrace

#endif  // ROOMTRACE_SYNTHETIC_HPP
