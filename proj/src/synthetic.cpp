// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "roomtrace/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>
#include <optional>
#include <random>

#include "roomtrace/error.hpp"

namespace roomtrace {
namespace {

constexpr double kEps = 1e-9;

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::kInvalidLayout, msg); }

// A planar rectangle origin + a * e1 + b * e2, a and b in [0, 1].
struct Surface {
  Point3 origin;
  Point3 e1;
  Point3 e2;
  double weight{0.0};

  [[nodiscard]] double area() const {
    return std::sqrt(e1.x * e1.x + e1.y * e1.y + e1.z * e1.z) * std::sqrt(e2.x * e2.x + e2.y * e2.y + e2.z * e2.z);
  }
};

// Wall face: a room edge plus the carved intervals along it.
struct Face {
  Vec2 start;
  int axis{0};  ///< 0: runs along x, 1: runs along y
  double lo{0.0};
  double hi{0.0};
  std::vector<std::pair<double, double>> carved;
};

struct SharedWall {
  int axis{0};  ///< axis the wall runs along
  double midline{0.0};
  double span_lo{0.0};
  double span_hi{0.0};
  int face_a{0};  ///< face index in room order S, E, N, W
  int face_b{0};
};

std::optional<SharedWall> shared_wall(const SceneRoom& a, const SceneRoom& b, double thickness) {
  const double tol = thickness + kEps;
  // Vertical walls (running along y).
  const double y_lo = std::max(a.min.y, b.min.y), y_hi = std::min(a.max.y, b.max.y);
  if (y_hi > y_lo) {
    if (b.min.x >= a.max.x && b.min.x - a.max.x <= tol) return SharedWall{1, 0.5 * (a.max.x + b.min.x), y_lo, y_hi, 1, 3};
    if (a.min.x >= b.max.x && a.min.x - b.max.x <= tol) return SharedWall{1, 0.5 * (b.max.x + a.min.x), y_lo, y_hi, 3, 1};
  }
  const double x_lo = std::max(a.min.x, b.min.x), x_hi = std::min(a.max.x, b.max.x);
  if (x_hi > x_lo) {
    if (b.min.y >= a.max.y && b.min.y - a.max.y <= tol) return SharedWall{0, 0.5 * (a.max.y + b.min.y), x_lo, x_hi, 2, 0};
    if (a.min.y >= b.max.y && a.min.y - b.max.y <= tol) return SharedWall{0, 0.5 * (b.max.y + a.min.y), x_lo, x_hi, 0, 2};
  }
  return std::nullopt;
}

std::vector<Face> room_faces(const SceneRoom& r) {
  return {{{r.min.x, r.min.y}, 0, r.min.x, r.max.x, {}},
          {{r.max.x, r.min.y}, 1, r.min.y, r.max.y, {}},
          {{r.min.x, r.max.y}, 0, r.min.x, r.max.x, {}},
          {{r.min.x, r.min.y}, 1, r.min.y, r.max.y, {}}};
}

// Splits one face into full-height pieces and pieces above the door height.
void face_surfaces(const Face& face, const SyntheticScene& scene, std::vector<Surface>& out) {
  std::vector<std::pair<double, double>> carved = face.carved;
  std::sort(carved.begin(), carved.end());
  auto piece = [&](double u0, double u1, double z0) {
    if (u1 - u0 <= 0.0 || scene.ceiling_height - z0 <= 0.0) return;
    Surface s;
    const double run = u1 - u0, rise = scene.ceiling_height - z0;
    if (face.axis == 0) {
      s.origin = {u0, face.start.y, z0};
      s.e1 = {run, 0.0, 0.0};
    } else {
      s.origin = {face.start.x, u0, z0};
      s.e1 = {0.0, run, 0.0};
    }
    s.e2 = {0.0, 0.0, rise};
    s.weight = scene.weights.wall;
    out.push_back(s);
  };
  double cursor = face.lo;
  for (const auto& [c0, c1] : carved) {
    piece(cursor, c0, 0.0);
    piece(c0, c1, scene.door_height);
    cursor = c1;
  }
  piece(cursor, face.hi, 0.0);
}

std::vector<std::size_t> allocate(const std::vector<Surface>& surfaces, std::size_t total) {
  std::vector<double> quota(surfaces.size());
  for (std::size_t i = 0; i < surfaces.size(); ++i) quota[i] = surfaces[i].weight * surfaces[i].area();
  const double sum = std::accumulate(quota.begin(), quota.end(), 0.0);
  std::vector<std::size_t> counts(surfaces.size(), 0);
  if (!(sum > 0.0)) invalid("scene has no sampled surface area");
  std::vector<double> frac(surfaces.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < surfaces.size(); ++i) {
    const double exact = static_cast<double>(total) * quota[i] / sum;
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    frac[i] = exact - std::floor(exact);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(surfaces.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t k = 0; assigned < total && k < order.size(); ++k, ++assigned) ++counts[order[k]];
  return counts;
}

Vec2 rotate(const Vec2& p, double c, double s) { return {c * p.x - s * p.y, s * p.x + c * p.y}; }

nlohmann::ordered_json point_json(const Vec2& p) { return nlohmann::ordered_json::array({p.x, p.y}); }

Vec2 point_from_json(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

void validate_scene(const SyntheticScene& scene) {
  if (scene.rooms.empty()) invalid("scene has no rooms");
  for (const SceneRoom& r : scene.rooms) {
    if (!(r.max.x > r.min.x && r.max.y > r.min.y)) invalid("room " + r.id + " is degenerate");
  }
  for (std::size_t a = 0; a < scene.rooms.size(); ++a) {
    for (std::size_t b = a + 1; b < scene.rooms.size(); ++b) {
      const SceneRoom& ra = scene.rooms[a];
      const SceneRoom& rb = scene.rooms[b];
      if (ra.id == rb.id) invalid("duplicate room id " + ra.id);
      const bool x = std::min(ra.max.x, rb.max.x) > std::max(ra.min.x, rb.min.x);
      const bool y = std::min(ra.max.y, rb.max.y) > std::max(ra.min.y, rb.min.y);
      if (x && y) invalid("rooms " + ra.id + " and " + rb.id + " overlap");
    }
  }
  for (const SceneDoor& d : scene.doors) {
    if (d.room_a >= scene.rooms.size() || d.room_b >= scene.rooms.size() || d.room_a == d.room_b) {
      invalid("door references unknown or identical rooms");
    }
    const auto wall = shared_wall(scene.rooms[d.room_a], scene.rooms[d.room_b], scene.wall_thickness);
    if (!wall) invalid("rooms " + scene.rooms[d.room_a].id + " and " + scene.rooms[d.room_b].id + " share no wall");
    if (!(d.hi > d.lo) || d.lo < wall->span_lo - kEps || d.hi > wall->span_hi + kEps) {
      invalid("door interval lies outside the shared wall");
    }
  }
  if (!(scene.ceiling_height > 0.0)) invalid("ceiling_height must be positive");
  if (!(scene.door_height > 0.0 && scene.door_height < scene.ceiling_height)) {
    invalid("door_height must lie strictly between 0 and ceiling_height");
  }
  if (scene.total_points == 0) invalid("total_points must be positive");
  if (scene.weights.ceiling < 0.0 || scene.weights.floor < 0.0 || scene.weights.wall < 0.0) {
    invalid("surface weights must be non-negative");
  }
  if (scene.noise_sigma < 0.0 || !(scene.wall_thickness > 0.0)) invalid("noise_sigma and wall_thickness out of range");
}

SyntheticResult generate_synthetic(const SyntheticScene& scene) {
  validate_scene(scene);

  std::vector<std::vector<Face>> faces;
  for (const SceneRoom& r : scene.rooms) faces.push_back(room_faces(r));
  SyntheticResult result;
  for (const SceneDoor& d : scene.doors) {
    const SharedWall wall = *shared_wall(scene.rooms[d.room_a], scene.rooms[d.room_b], scene.wall_thickness);
    faces[d.room_a][static_cast<std::size_t>(wall.face_a)].carved.emplace_back(d.lo, d.hi);
    faces[d.room_b][static_cast<std::size_t>(wall.face_b)].carved.emplace_back(d.lo, d.hi);
    GroundTruthDoor truth;
    truth.room_a = d.room_a;
    truth.room_b = d.room_b;
    truth.segment = wall.axis == 0 ? Segment2{{d.lo, wall.midline}, {d.hi, wall.midline}}
                                   : Segment2{{wall.midline, d.lo}, {wall.midline, d.hi}};
    result.truth.doors.push_back(truth);
  }

  std::vector<Surface> surfaces;
  for (std::size_t i = 0; i < scene.rooms.size(); ++i) {
    const SceneRoom& r = scene.rooms[i];
    const double w = r.max.x - r.min.x, h = r.max.y - r.min.y;
    surfaces.push_back({{r.min.x, r.min.y, scene.ceiling_height}, {w, 0.0, 0.0}, {0.0, h, 0.0}, scene.weights.ceiling});
    surfaces.push_back({{r.min.x, r.min.y, 0.0}, {w, 0.0, 0.0}, {0.0, h, 0.0}, scene.weights.floor});
    for (const Face& f : faces[i]) face_surfaces(f, scene, surfaces);
  }
  const auto counts = allocate(surfaces, scene.total_points);

  const double angle = deg_to_rad(scene.rotation_deg);
  const double c = std::cos(angle), s = std::sin(angle);
  std::mt19937_64 rng(scene.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, scene.noise_sigma > 0.0 ? scene.noise_sigma : 1.0);
  auto jitter = [&]() { return scene.noise_sigma > 0.0 ? noise(rng) : 0.0; };

  std::vector<Point3> points;
  points.reserve(scene.total_points);
  // Plastic-number recurrence constants of the R2 sequence.
  constexpr double kPlastic = 1.32471795724474602596;
  constexpr double kStep1 = 1.0 / kPlastic, kStep2 = 1.0 / (kPlastic * kPlastic);
  for (std::size_t i = 0; i < surfaces.size(); ++i) {
    const Surface& f = surfaces[i];
    const double start1 = unit(rng), start2 = unit(rng);
    for (std::size_t k = 0; k < counts[i]; ++k) {
      double a = 0.0, b = 0.0;
      if (scene.sampling == SurfaceSampling::kUniform) {
        a = unit(rng);
        b = unit(rng);
      } else {
        const double kk = static_cast<double>(k);
        a = start1 + kk * kStep1;
        b = start2 + kk * kStep2;
        a -= std::floor(a);
        b -= std::floor(b);
      }
      Point3 p{f.origin.x + a * f.e1.x + b * f.e2.x, f.origin.y + a * f.e1.y + b * f.e2.y,
               f.origin.z + a * f.e1.z + b * f.e2.z};
      p.x += jitter();
      p.y += jitter();
      p.z += jitter();
      const Vec2 q = rotate({p.x, p.y}, c, s);
      points.push_back({q.x, q.y, p.z});
    }
  }
  result.cloud = PointCloud(std::move(points));

  for (const SceneRoom& r : scene.rooms) {
    std::vector<Vec2> ring = {{r.min.x, r.min.y}, {r.max.x, r.min.y}, {r.max.x, r.max.y}, {r.min.x, r.max.y}};
    for (Vec2& v : ring) v = rotate(v, c, s);
    for (std::size_t k = 0; k < ring.size(); ++k) result.truth.boundaries.push_back({ring[k], ring[(k + 1) % ring.size()]});
    result.truth.rooms.push_back(std::move(ring));
  }
  for (GroundTruthDoor& d : result.truth.doors) d.segment = {rotate(d.segment.a, c, s), rotate(d.segment.b, c, s)};
  return result;
}

SyntheticScene builtin_scene(const std::string& name) {
  SyntheticScene scene;
  if (name == "one_room") {
    scene.rooms = {{"A", {0.0, 0.0}, {5.0, 4.0}}};
    scene.total_points = 20000;
  } else if (name == "two_room") {
    scene.rooms = {{"A", {0.0, 0.0}, {4.9, 4.0}}, {"B", {5.1, 0.0}, {9.0, 4.0}}};
    scene.doors = {{0, 1, 1.5, 2.4}};
    scene.total_points = 30000;
  } else if (name == "three_room") {
    scene.rooms = {{"A", {0.0, 0.0}, {4.9, 4.0}}, {"B", {5.1, 0.0}, {9.0, 4.0}}, {"C", {0.0, 4.2}, {9.0, 7.5}}};
    scene.doors = {{0, 1, 1.5, 2.4}, {0, 2, 1.5, 2.4}};
    scene.total_points = 40000;
  } else if (name == "four_room") {
    scene.rooms = {{"A", {0.0, 0.0}, {5.9, 3.9}},
                   {"B", {6.1, 0.0}, {10.0, 3.9}},
                   {"C", {0.0, 4.1}, {3.9, 8.0}},
                   {"D", {4.1, 4.1}, {10.0, 8.0}}};
    scene.doors = {{0, 1, 1.5, 2.4}, {0, 2, 1.5, 2.4}, {1, 3, 7.5, 8.4}};
    scene.total_points = 50000;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown built-in scene '" + name + "'");
  }
  return scene;
}

std::vector<std::string> builtin_scene_names() { return {"one_room", "two_room", "three_room", "four_room"}; }

SyntheticScene scene_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    SyntheticScene scene;
    for (const auto& r : j.at("rooms")) {
      scene.rooms.push_back({r.at("id").get<std::string>(), point_from_json(r.at("min")), point_from_json(r.at("max"))});
    }
    auto room_index = [&](const std::string& id) {
      for (std::size_t i = 0; i < scene.rooms.size(); ++i) {
        if (scene.rooms[i].id == id) return i;
      }
      invalid("door references unknown room " + id);
    };
    if (j.contains("doors")) {
      for (const auto& d : j.at("doors")) {
        scene.doors.push_back({room_index(d.at("rooms").at(0).get<std::string>()),
                               room_index(d.at("rooms").at(1).get<std::string>()), d.at("interval").at(0).get<double>(),
                               d.at("interval").at(1).get<double>()});
      }
    }
    scene.wall_thickness = j.value("wall_thickness", scene.wall_thickness);
    scene.ceiling_height = j.value("ceiling_height", scene.ceiling_height);
    scene.door_height = j.value("door_height", scene.door_height);
    if (j.contains("weights")) {
      const auto& w = j.at("weights");
      scene.weights.ceiling = w.value("ceiling", scene.weights.ceiling);
      scene.weights.floor = w.value("floor", scene.weights.floor);
      scene.weights.wall = w.value("wall", scene.weights.wall);
    }
    scene.total_points = j.value("total_points", scene.total_points);
    scene.noise_sigma = j.value("noise_sigma", scene.noise_sigma);
    if (j.contains("sampling")) {
      const auto mode = j.at("sampling").get<std::string>();
      if (mode == "uniform") scene.sampling = SurfaceSampling::kUniform;
      else if (mode == "low_discrepancy") scene.sampling = SurfaceSampling::kLowDiscrepancy;
      else invalid("unknown sampling mode " + mode);
    }
    scene.rotation_deg = j.value("rotation_deg", scene.rotation_deg);
    scene.seed = j.value("seed", scene.seed);
    validate_scene(scene);
    return scene;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kDecodeFailure, std::string("scene: ") + e.what());
  }
}

std::string scene_to_json(const SyntheticScene& scene) {
  nlohmann::ordered_json j;
  j["rooms"] = nlohmann::ordered_json::array();
  for (const SceneRoom& r : scene.rooms) {
    j["rooms"].push_back({{"id", r.id}, {"min", point_json(r.min)}, {"max", point_json(r.max)}});
  }
  j["doors"] = nlohmann::ordered_json::array();
  for (const SceneDoor& d : scene.doors) {
    nlohmann::ordered_json door;
    door["rooms"] = nlohmann::ordered_json::array({scene.rooms.at(d.room_a).id, scene.rooms.at(d.room_b).id});
    door["interval"] = nlohmann::ordered_json::array({d.lo, d.hi});
    j["doors"].push_back(std::move(door));
  }
  j["wall_thickness"] = scene.wall_thickness;
  j["ceiling_height"] = scene.ceiling_height;
  j["door_height"] = scene.door_height;
  j["weights"] = {{"ceiling", scene.weights.ceiling}, {"floor", scene.weights.floor}, {"wall", scene.weights.wall}};
  j["total_points"] = scene.total_points;
  j["noise_sigma"] = scene.noise_sigma;
  j["sampling"] = scene.sampling == SurfaceSampling::kUniform ? "uniform" : "low_discrepancy";
  j["rotation_deg"] = scene.rotation_deg;
  j["seed"] = scene.seed;
  return j.dump(2) + "\n";
}

}  // namespace roomtrace
