// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0
//
// Bird's-eye density raster: adaptive resolution frame, per-pixel point
// counts, and the log / blur / CLAHE enhancement used by prompt extraction
// and segmentation.

#ifndef ROOMTRACE_DENSITY_HPP
#define ROOMTRACE_DENSITY_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "roomtrace/ingest.hpp"
#include "roomtrace/raster.hpp"

namespace roomtrace {

struct ProjectionFrame {
  double x_min{0.0};
  double y_min{0.0};
  double pixel_size{1.0};
  int width{1};
  int height{1};

  friend bool operator==(const ProjectionFrame&, const ProjectionFrame&) = default;

  /// (floor((x - x_min) / s), floor((y - y_min) / s)), with a coordinate
  /// lying exactly on the far frame edge folded into the last pixel.
  /// Returns nullopt when the point falls outside the frame.
  [[nodiscard]] std::optional<std::pair<int, int>> pixel_of(double x, double y) const;

  /// Centre of pixel (m, n) in world meters.
  [[nodiscard]] Vec2 pixel_center(double m, double n) const {
    return {x_min + (m + 0.5) * pixel_size, y_min + (n + 0.5) * pixel_size};
  }

  [[nodiscard]] double area_m2() const {
    return static_cast<double>(width) * static_cast<double>(height) * pixel_size * pixel_size;
  }
};

struct FrameParams {
  double kappa{1000.0};
  int r_min{256};
  int r_max{4096};
};

/// Mean 3D nearest-neighbour distance over min(sample, N) stride-sampled
/// points. Throws TooFewPoints when the cloud has fewer than two points.
double estimate_point_spacing(const PointCloud& cloud, std::size_t sample = 10000);

/// R = clamp(kappa * max_extent / delta, r_min, r_max), rounded down to an
/// integer pixel count; s = max_extent / R. Throws DegenerateExtent.
ProjectionFrame compute_frame(const Bounds3& bounds, double delta, const FrameParams& params = {});

/// R before clamping, for logging.
double raw_resolution(const Bounds3& bounds, double delta, double kappa);

struct DensityGrid {
  ProjectionFrame frame;
  CountRaster counts;
  std::optional<ByteRaster> enhanced;
};

/// Throws PointOutsideFrame.
DensityGrid project_density(const PointCloud& cloud, const ProjectionFrame& frame);

struct EnhanceParams {
  int blur_kernel{5};
  double blur_sigma{1.0};
  double clahe_clip{2.0};
  int clahe_tiles{8};
};

/// log1p(counts); the monotone pre-normalization image.
Raster<double> log_image(const CountRaster& counts);

/// log1p(counts) scaled linearly so its maximum maps to 255, rounded.
/// Throws EmptyCounts when every count is zero.
ByteRaster log_normalize(const CountRaster& counts);

/// Normalized 1D Gaussian of odd length `size`.
std::vector<double> gaussian_kernel(int size, double sigma);

/// Separable Gaussian blur with reflect-101 borders.
Raster<double> gaussian_blur(const Raster<double>& image, int size, double sigma);

/// Contrast-limited adaptive histogram equalization with tiles x tiles
/// regions (fewer when the image is smaller) and bilinear blending between
/// tile mappings.
ByteRaster clahe(const ByteRaster& image, double clip, int tiles);

/// Fills grid.enhanced with clahe(round(blur(log_normalize(counts)))).
DensityGrid enhance(DensityGrid grid, const EnhanceParams& params = {});

/// {"x_min","y_min","pixel_size","width","height"}; shortest round-trip
/// number formatting.
std::string frame_to_json(const ProjectionFrame& frame);
ProjectionFrame frame_from_json(const std::string& text);

/// Hex FNV-1a of the exact frame.json bytes.
std::string frame_fingerprint(const std::string& frame_json_bytes);

/// Writes the enhanced raster as density.png and the frame as frame.json.
/// Throws IoFailure, or EmptyRaster when enhance has not run.
void export_density_png(const DensityGrid& grid, const std::filesystem::path& png_path,
                        const std::filesystem::path& frame_path);

/// Inverse of export_density_png; counts are left empty.
DensityGrid import_density_png(const std::filesystem::path& png_path,
                               const std::filesystem::path& frame_path);

}  // namespace roomtrace

#endif  // ROOMTRACE_DENSITY_HPP
