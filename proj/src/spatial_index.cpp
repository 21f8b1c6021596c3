// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "roomtrace/spatial_index.hpp"

#include <algorithm>
#include <cmath>

#include "roomtrace/error.hpp"

namespace roomtrace {
namespace {

constexpr std::int64_t kMaxAxisCells3 = (1 << 20) - 1;

std::uint64_t key2(std::int64_t cx, std::int64_t cy) {
  return (static_cast<std::uint64_t>(cx) << 32) | static_cast<std::uint64_t>(cy);
}

std::uint64_t key3(std::int64_t cx, std::int64_t cy, std::int64_t cz) {
  return (static_cast<std::uint64_t>(cx) << 42) | (static_cast<std::uint64_t>(cy) << 21) |
         static_cast<std::uint64_t>(cz);
}

void consider(std::size_t i, double d, Neighbor& best) {
  if (d < best.distance || (d == best.distance && i < best.index)) best = {i, d};
}

}  // namespace

GridIndex2::GridIndex2(std::span<const Vec2> points, double cell) : points_(points), cell_(cell) {
  if (!(cell > 0.0)) throw Error(ErrorCode::kInvalidArgument, "grid cell must be positive");
  if (points.empty()) return;
  cx_min_ = cy_min_ = std::numeric_limits<std::int64_t>::max();
  cx_max_ = cy_max_ = std::numeric_limits<std::int64_t>::min();
  for (const Vec2& p : points) {
    cx_min_ = std::min(cx_min_, coord(p.x));
    cx_max_ = std::max(cx_max_, coord(p.x));
    cy_min_ = std::min(cy_min_, coord(p.y));
    cy_max_ = std::max(cy_max_, coord(p.y));
  }
  if (cx_max_ - cx_min_ > 0xffffffffLL || cy_max_ - cy_min_ > 0xffffffffLL) {
    throw Error(ErrorCode::kInvalidArgument, "grid cell too small for the point extent");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    cells_[key2(coord(points[i].x) - cx_min_, coord(points[i].y) - cy_min_)].push_back(
        static_cast<std::uint32_t>(i));
  }
}

std::int64_t GridIndex2::coord(double v) const {
  return static_cast<std::int64_t>(std::floor(v / cell_));
}

const std::vector<std::uint32_t>* GridIndex2::cell_at(std::int64_t cx, std::int64_t cy) const {
  if (cx < cx_min_ || cx > cx_max_ || cy < cy_min_ || cy > cy_max_) return nullptr;
  auto it = cells_.find(key2(cx - cx_min_, cy - cy_min_));
  return it == cells_.end() ? nullptr : &it->second;
}

void GridIndex2::for_each_within(const Vec2& p, double r,
                                 const std::function<void(std::size_t)>& visit) const {
  if (cells_.empty()) return;
  const std::int64_t x0 = std::max(coord(p.x - r), cx_min_), x1 = std::min(coord(p.x + r), cx_max_);
  const std::int64_t y0 = std::max(coord(p.y - r), cy_min_), y1 = std::min(coord(p.y + r), cy_max_);
  for (std::int64_t cy = y0; cy <= y1; ++cy) {
    for (std::int64_t cx = x0; cx <= x1; ++cx) {
      const auto* bucket = cell_at(cx, cy);
      if (bucket == nullptr) continue;
      for (std::uint32_t i : *bucket) {
        if (distance(p, points_[i]) <= r) visit(i);
      }
    }
  }
}

std::optional<Neighbor> GridIndex2::nearest(const Vec2& p) const {
  if (cells_.empty()) return std::nullopt;
  const std::int64_t qx = coord(p.x), qy = coord(p.y);
  const std::int64_t k_max = std::max({std::abs(qx - cx_min_), std::abs(qx - cx_max_),
                                       std::abs(qy - cy_min_), std::abs(qy - cy_max_)});
  Neighbor best;
  for (std::int64_t k = 0; k <= k_max; ++k) {
    for (std::int64_t cy = qy - k; cy <= qy + k; ++cy) {
      const bool edge_row = cy == qy - k || cy == qy + k;
      const std::int64_t step = edge_row ? 1 : 2 * k;
      for (std::int64_t cx = qx - k; cx <= qx + k; cx += std::max<std::int64_t>(step, 1)) {
        const auto* bucket = cell_at(cx, cy);
        if (bucket == nullptr) continue;
        for (std::uint32_t i : *bucket) consider(i, distance(p, points_[i]), best);
      }
    }
    // Cells beyond ring k are at least k * cell away from p.
    if (best.distance <= static_cast<double>(k) * cell_) break;
  }
  return best;
}

GridIndex3::GridIndex3(std::span<const Point3> points, double cell) : points_(points), cell_(cell) {
  if (!(cell > 0.0)) throw Error(ErrorCode::kInvalidArgument, "grid cell must be positive");
  if (points.empty()) return;
  double lo[3] = {points[0].x, points[0].y, points[0].z};
  double hi[3] = {lo[0], lo[1], lo[2]};
  for (const Point3& p : points) {
    const double v[3] = {p.x, p.y, p.z};
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], v[a]);
      hi[a] = std::max(hi[a], v[a]);
    }
  }
  for (int a = 0; a < 3; ++a) {
    cell_ = std::max(cell_, (hi[a] - lo[a]) / static_cast<double>(kMaxAxisCells3 - 1));
  }
  for (int a = 0; a < 3; ++a) {
    lo_[a] = coord(lo[a]);
    hi_[a] = coord(hi[a]);
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point3& p = points[i];
    cells_[key3(coord(p.x) - lo_[0], coord(p.y) - lo_[1], coord(p.z) - lo_[2])].push_back(
        static_cast<std::uint32_t>(i));
  }
}

std::int64_t GridIndex3::coord(double v) const {
  return static_cast<std::int64_t>(std::floor(v / cell_));
}

std::optional<Neighbor> GridIndex3::nearest_other(std::size_t self) const {
  if (points_.size() < 2) return std::nullopt;
  const Point3& p = points_[self];
  const std::int64_t q[3] = {coord(p.x), coord(p.y), coord(p.z)};
  std::int64_t k_max = 0;
  for (int a = 0; a < 3; ++a) k_max = std::max({k_max, std::abs(q[a] - lo_[a]), std::abs(q[a] - hi_[a])});

  Neighbor best;
  for (std::int64_t k = 0; k <= k_max; ++k) {
    for (std::int64_t dz = -k; dz <= k; ++dz) {
      for (std::int64_t dy = -k; dy <= k; ++dy) {
        const bool face = std::abs(dz) == k || std::abs(dy) == k;
        const std::int64_t step = face ? 1 : std::max<std::int64_t>(2 * k, 1);
        for (std::int64_t dx = -k; dx <= k; dx += step) {
          const std::int64_t c[3] = {q[0] + dx, q[1] + dy, q[2] + dz};
          bool inside = true;
          for (int a = 0; a < 3; ++a) inside = inside && c[a] >= lo_[a] && c[a] <= hi_[a];
          if (!inside) continue;
          auto it = cells_.find(key3(c[0] - lo_[0], c[1] - lo_[1], c[2] - lo_[2]));
          if (it == cells_.end()) continue;
          for (std::uint32_t i : it->second) {
            if (i == self) continue;
            const Point3& o = points_[i];
            consider(i, std::sqrt((o.x - p.x) * (o.x - p.x) + (o.y - p.y) * (o.y - p.y) +
                                  (o.z - p.z) * (o.z - p.z)),
                     best);
          }
        }
      }
    }
    if (best.distance <= static_cast<double>(k) * cell_) break;
  }
  return best;
}

}  // namespace roomtrace
