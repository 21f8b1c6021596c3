// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "roomtrace/error.hpp"
#include "roomtrace/file_io.hpp"
#include "roomtrace/geometry.hpp"
#include "roomtrace/hash.hpp"

namespace roomtrace {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kMalformedHeader: return "MalformedHeader";
    case ErrorCode::kNonFiniteCoordinate: return "NonFiniteCoordinate";
    case ErrorCode::kEmptyCloud: return "EmptyCloud";
    case ErrorCode::kNonPositiveVoxel: return "NonPositiveVoxel";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kDegenerateExtent: return "DegenerateExtent";
    case ErrorCode::kPointOutsideFrame: return "PointOutsideFrame";
    case ErrorCode::kEmptyCounts: return "EmptyCounts";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kEmptyRaster: return "EmptyRaster";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kFrameMismatch: return "FrameMismatch";
    case ErrorCode::kDecodeFailure: return "DecodeFailure";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNoCandidates: return "NoCandidates";
    case ErrorCode::kMultipleComponents: return "MultipleComponents";
    case ErrorCode::kDegenerateAfterMerge: return "DegenerateAfterMerge";
    case ErrorCode::kOverlappingRooms: return "OverlappingRooms";
    case ErrorCode::kEmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorCode::kInvalidLayout: return "InvalidLayout";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

std::string to_hex(std::uint64_t value) {
  std::array<char, 17> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(value));
  return std::string(buf.data(), 16);
}

double signed_area(std::span<const Vec2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) twice += ring[i].cross(ring[(i + 1) % n]);
  return 0.5 * twice;
}

double perimeter(std::span<const Vec2> ring) {
  const std::size_t n = ring.size();
  if (n < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += distance(ring[i], ring[(i + 1) % n]);
  return total;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  if (len2 <= 0.0) return distance(p, a);
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

bool point_in_polygon(const Vec2& p, std::span<const Vec2> ring) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

std::vector<Segment2> ring_edges(std::span<const Vec2> ring) {
  std::vector<Segment2> edges;
  const std::size_t n = ring.size();
  if (n < 2) return edges;
  edges.reserve(n);
  for (std::size_t i = 0; i < n; ++i) edges.push_back({ring[i], ring[(i + 1) % n]});
  return edges;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIoFailure, "short write to " + path.string());
}

}  // namespace roomtrace
