// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0
//
// Point-cloud ingestion: PLY (ascii / binary little endian) and XYZ text
// parsing, voxel downsampling, and the writers used to persist clouds
// between pipeline stages.
//
// Only vertex x/y/z of 4- or 8-byte float type are read; every other
// property and element is skipped. Coordinates are taken as meters.

#ifndef ROOMTRACE_INGEST_HPP
#define ROOMTRACE_INGEST_HPP

#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "roomtrace/geometry.hpp"

namespace roomtrace {

enum class CloudFormat { kPlyAscii, kPlyBinaryLE, kXyzText };

/// Immutable, validated point set with exact axis-aligned bounds.
/// An empty cloud can be constructed but has no bounds; every pipeline
/// stage rejects it with EmptyCloud.
class PointCloud {
 public:
  PointCloud() = default;
  /// Throws NonFiniteCoordinate if any coordinate is NaN or infinite.
  explicit PointCloud(std::vector<Point3> points);

  [[nodiscard]] const std::vector<Point3>& points() const noexcept { return points_; }
  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] bool empty() const noexcept { return points_.empty(); }
  const Point3& operator[](std::size_t i) const { return points_[i]; }
  [[nodiscard]] auto begin() const noexcept { return points_.begin(); }
  [[nodiscard]] auto end() const noexcept { return points_.end(); }

  /// Throws EmptyCloud when the cloud has no points.
  [[nodiscard]] const Bounds3& bounds() const;

  /// Throws EmptyCloud naming `stage` when empty.
  void require_non_empty(std::string_view stage) const;

  friend bool operator==(const PointCloud& a, const PointCloud& b) {
    return a.points_ == b.points_;
  }

 private:
  std::vector<Point3> points_;
  Bounds3 bounds_{};
};

PointCloud parse_point_cloud(std::string_view bytes, CloudFormat format);

/// Reads a file and picks the format from its extension (.xyz/.txt) or,
/// for .ply, from the header's format line.
PointCloud read_point_cloud(const std::filesystem::path& path);

/// Shortest round-trip decimal representation, one "x y z" line per point.
void write_xyz(const PointCloud& cloud, std::ostream& out);
void write_xyz(const PointCloud& cloud, const std::filesystem::path& path);

/// binary_little_endian PLY with double x/y/z; bit-exact round trip.
void write_ply_binary(const PointCloud& cloud, const std::filesystem::path& path);

/// One point per occupied voxel (floor(x/voxel), floor(y/voxel),
/// floor(z/voxel)), placed at the centroid of that voxel's points. Output
/// order follows the first occurrence of each voxel in the input.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel);

}  // namespace roomtrace

#endif  // ROOMTRACE_INGEST_HPP
