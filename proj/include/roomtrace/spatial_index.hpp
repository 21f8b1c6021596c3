// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0
//
// Uniform hashed grids for radius and nearest-neighbour queries over 2D and
// 3D point sets.

#ifndef ROOMTRACE_SPATIAL_INDEX_HPP
#define ROOMTRACE_SPATIAL_INDEX_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "roomtrace/geometry.hpp"

namespace roomtrace {

struct Neighbor {
  std::size_t index{0};
  double distance{std::numeric_limits<double>::infinity()};
};

class GridIndex2 {
 public:
  /// The index stores indices into `points`, which must outlive it.
  GridIndex2(std::span<const Vec2> points, double cell);

  /// Calls visit(i) for every point with distance(p, points[i]) <= r, in
  /// ascending cell order then insertion order.
  void for_each_within(const Vec2& p, double r, const std::function<void(std::size_t)>& visit) const;

  /// Nearest stored point to p (ties to the lowest index); nullopt when empty.
  [[nodiscard]] std::optional<Neighbor> nearest(const Vec2& p) const;

 private:
  [[nodiscard]] std::int64_t coord(double v) const;
  [[nodiscard]] const std::vector<std::uint32_t>* cell_at(std::int64_t cx, std::int64_t cy) const;

  std::span<const Vec2> points_;
  double cell_;
  std::int64_t cx_min_{0}, cx_max_{-1}, cy_min_{0}, cy_max_{-1};
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

class GridIndex3 {
 public:
  GridIndex3(std::span<const Point3> points, double cell);

  /// Nearest stored point other than index `self` (ties to the lowest index).
  [[nodiscard]] std::optional<Neighbor> nearest_other(std::size_t self) const;

 private:
  [[nodiscard]] std::int64_t coord(double v) const;

  std::span<const Point3> points_;
  double cell_;
  std::int64_t lo_[3]{0, 0, 0};
  std::int64_t hi_[3]{-1, -1, -1};
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

}  // namespace roomtrace

#endif  // ROOMTRACE_SPATIAL_INDEX_HPP
