// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0
//
// Small value types shared by every stage: 3D points, 2D vectors, boxes and
// segments. All coordinates are meters unless a name says otherwise.

#ifndef ROOMTRACE_GEOMETRY_HPP
#define ROOMTRACE_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace roomtrace {

struct Point3 {
  double x{0.0};
  double y{0.0};
  double z{0.0};

  friend bool operator==(const Point3&, const Point3&) = default;
};

struct Vec2 {
  double x{0.0};
  double y{0.0};

  friend bool operator==(const Vec2&, const Vec2&) = default;
  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  Vec2 operator/(double k) const { return {x / k, y / k}; }
  [[nodiscard]] double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  [[nodiscard]] double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  [[nodiscard]] double norm() const { return std::hypot(x, y); }
  [[nodiscard]] Vec2 perp() const { return {-y, x}; }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

struct Bounds3 {
  double x_min{0.0}, x_max{0.0};
  double y_min{0.0}, y_max{0.0};
  double z_min{0.0}, z_max{0.0};

  friend bool operator==(const Bounds3&, const Bounds3&) = default;
  [[nodiscard]] double x_extent() const { return x_max - x_min; }
  [[nodiscard]] double y_extent() const { return y_max - y_min; }
};

struct Segment2 {
  Vec2 a;
  Vec2 b;

  [[nodiscard]] double length() const { return distance(a, b); }
};

/// Signed shoelace area; positive for counter-clockwise rings.
double signed_area(std::span<const Vec2> ring);

/// Closed-ring perimeter (last vertex connects back to the first).
double perimeter(std::span<const Vec2> ring);

/// Distance from p to the closed segment [a, b].
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

/// Even-odd point-in-polygon test for a closed ring.
bool point_in_polygon(const Vec2& p, std::span<const Vec2> ring);

/// Edge i of a closed ring runs from ring[i] to ring[(i+1) % n].
std::vector<Segment2> ring_edges(std::span<const Vec2> ring);

/// Undirected line angle folded into [0, pi).
inline double line_angle(const Vec2& d) {
  double a = std::atan2(d.y, d.x);
  if (a < 0.0) a += std::numbers::pi;
  if (a >= std::numbers::pi) a -= std::numbers::pi;
  return a;
}

/// Smallest difference between two undirected line angles, in [0, pi/2].
inline double line_angle_difference(double a, double b) {
  const double d = std::fmod(std::abs(a - b), std::numbers::pi);
  return std::min(d, std::numbers::pi - d);
}

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace roomtrace

#endif  // ROOMTRACE_GEOMETRY_HPP
