// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "roomtrace/density.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <json.hpp>

#include "roomtrace/error.hpp"
#include "roomtrace/file_io.hpp"
#include "roomtrace/hash.hpp"
#include "roomtrace/png_io.hpp"
#include "roomtrace/spatial_index.hpp"

namespace roomtrace {
namespace {

// Index along one axis, folding the far edge into the last pixel.
std::optional<int> axis_index(double v, double origin, double s, int size) {
  const double t = (v - origin) / s;
  if (!(t >= 0.0)) return std::nullopt;
  const double f = std::floor(t);
  if (f < static_cast<double>(size)) return static_cast<int>(f);
  if (f == static_cast<double>(size) && v <= origin + static_cast<double>(size) * s) return size - 1;
  return std::nullopt;
}

int reflect101(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

}  // namespace

std::optional<std::pair<int, int>> ProjectionFrame::pixel_of(double x, double y) const {
  const auto m = axis_index(x, x_min, pixel_size, width);
  const auto n = axis_index(y, y_min, pixel_size, height);
  if (!m || !n) return std::nullopt;
  return std::make_pair(*m, *n);
}

double estimate_point_spacing(const PointCloud& cloud, std::size_t sample) {
  if (cloud.size() < 2) throw Error(ErrorCode::kTooFewPoints, "spacing needs at least two points");
  if (sample == 0) throw Error(ErrorCode::kInvalidArgument, "spacing sample must be >= 1");
  const Bounds3& b = cloud.bounds();
  const double ext = std::max({b.x_extent(), b.y_extent(), b.z_max - b.z_min});
  const double n = static_cast<double>(cloud.size());
  const double cell = ext > 0.0 ? ext / std::max(1.0, std::sqrt(n)) : 1.0;
  GridIndex3 index(cloud.points(), cell);

  const std::size_t count = std::min(sample, cloud.size());
  double total = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t i = k * cloud.size() / count;
    total += index.nearest_other(i)->distance;
  }
  return total / static_cast<double>(count);
}

double raw_resolution(const Bounds3& bounds, double delta, double kappa) {
  return kappa * std::max(bounds.x_extent(), bounds.y_extent()) / delta;
}

ProjectionFrame compute_frame(const Bounds3& bounds, double delta, const FrameParams& params) {
  if (!(bounds.x_extent() > 0.0) || !(bounds.y_extent() > 0.0)) {
    throw Error(ErrorCode::kDegenerateExtent, "cloud has zero extent in x or y");
  }
  if (!(delta > 0.0) || !(params.kappa > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "delta and kappa must be positive");
  }
  if (params.r_min < 1 || params.r_max < params.r_min) {
    throw Error(ErrorCode::kInvalidArgument, "resolution clamp must satisfy 1 <= r_min <= r_max");
  }
  const double raw = raw_resolution(bounds, delta, params.kappa);
  const double clamped =
      std::clamp(raw, static_cast<double>(params.r_min), static_cast<double>(params.r_max));
  const double r = std::floor(clamped);
  if (raw != clamped) spdlog::debug("resolution {:.1f} clamped to {:.0f}", raw, r);

  ProjectionFrame frame;
  frame.x_min = bounds.x_min;
  frame.y_min = bounds.y_min;
  frame.pixel_size = std::max(bounds.x_extent(), bounds.y_extent()) / r;
  frame.width = std::max(1, static_cast<int>(std::ceil(bounds.x_extent() / frame.pixel_size)));
  frame.height = std::max(1, static_cast<int>(std::ceil(bounds.y_extent() / frame.pixel_size)));
  return frame;
}

DensityGrid project_density(const PointCloud& cloud, const ProjectionFrame& frame) {
  DensityGrid grid;
  grid.frame = frame;
  grid.counts = CountRaster(frame.width, frame.height, 0);
  for (const Point3& p : cloud) {
    const auto px = frame.pixel_of(p.x, p.y);
    if (!px) {
      throw Error(ErrorCode::kPointOutsideFrame,
                  "point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") outside frame");
    }
    ++grid.counts.at(px->first, px->second);
  }
  return grid;
}

Raster<double> log_image(const CountRaster& counts) {
  Raster<double> out(counts.width(), counts.height());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out.data()[i] = std::log1p(static_cast<double>(counts.data()[i]));
  }
  return out;
}

ByteRaster log_normalize(const CountRaster& counts) {
  if (counts.empty()) throw Error(ErrorCode::kEmptyCounts, "density raster is empty");
  const Raster<double> logs = log_image(counts);
  const double peak = *std::max_element(logs.data().begin(), logs.data().end());
  if (!(peak > 0.0)) throw Error(ErrorCode::kEmptyCounts, "density raster has no points");
  ByteRaster out(counts.width(), counts.height());
  for (std::size_t i = 0; i < logs.size(); ++i) {
    out.data()[i] = static_cast<std::uint8_t>(std::lround(logs.data()[i] / peak * 255.0));
  }
  return out;
}

std::vector<double> gaussian_kernel(int size, double sigma) {
  if (size < 1 || size % 2 == 0) throw Error(ErrorCode::kInvalidArgument, "blur kernel must be odd");
  if (!(sigma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "blur sigma must be positive");
  const int half = size / 2;
  std::vector<double> k(static_cast<std::size_t>(size));
  double total = 0.0;
  for (int i = -half; i <= half; ++i) {
    k[static_cast<std::size_t>(i + half)] = std::exp(-0.5 * i * i / (sigma * sigma));
    total += k[static_cast<std::size_t>(i + half)];
  }
  for (double& v : k) v /= total;
  return k;
}

Raster<double> gaussian_blur(const Raster<double>& image, int size, double sigma) {
  const auto k = gaussian_kernel(size, sigma);
  const int half = size / 2;
  const int w = image.width(), h = image.height();
  Raster<double> rows(w, h), out(w, h);
  for (int n = 0; n < h; ++n) {
    for (int m = 0; m < w; ++m) {
      double acc = 0.0;
      for (int t = -half; t <= half; ++t) {
        acc += k[static_cast<std::size_t>(t + half)] * image.at(reflect101(m + t, w), n);
      }
      rows.at(m, n) = acc;
    }
  }
  for (int n = 0; n < h; ++n) {
    for (int m = 0; m < w; ++m) {
      double acc = 0.0;
      for (int t = -half; t <= half; ++t) {
        acc += k[static_cast<std::size_t>(t + half)] * rows.at(m, reflect101(n + t, h));
      }
      out.at(m, n) = acc;
    }
  }
  return out;
}

ByteRaster clahe(const ByteRaster& image, double clip, int tiles) {
  if (image.empty()) throw Error(ErrorCode::kEmptyRaster, "CLAHE input is empty");
  if (tiles < 1 || !(clip > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "CLAHE needs tiles >= 1 and clip > 0");
  }
  const int w = image.width(), h = image.height();
  const int tx = std::min(tiles, w), ty = std::min(tiles, h);
  auto tile_lo = [](int i, int count, int size) { return i * size / count; };

  std::vector<std::array<std::uint8_t, 256>> luts(static_cast<std::size_t>(tx * ty));
  for (int j = 0; j < ty; ++j) {
    for (int i = 0; i < tx; ++i) {
      const int x0 = tile_lo(i, tx, w), x1 = tile_lo(i + 1, tx, w);
      const int y0 = tile_lo(j, ty, h), y1 = tile_lo(j + 1, ty, h);
      std::array<long, 256> hist{};
      for (int n = y0; n < y1; ++n) {
        for (int m = x0; m < x1; ++m) ++hist[image.at(m, n)];
      }
      const long area = static_cast<long>(x1 - x0) * (y1 - y0);
      const long limit = std::max(1L, static_cast<long>(clip * static_cast<double>(area) / 256.0));
      long excess = 0;
      for (long& v : hist) {
        if (v > limit) {
          excess += v - limit;
          v = limit;
        }
      }
      const long batch = excess / 256;
      const long residual = excess - batch * 256;
      for (long& v : hist) v += batch;
      if (residual > 0) {
        const long step = std::max(256L / residual, 1L);
        for (long b = 0, left = residual; b < 256 && left > 0; b += step, --left) ++hist[b];
      }
      auto& lut = luts[static_cast<std::size_t>(j * tx + i)];
      long cdf = 0;
      const double scale = 255.0 / static_cast<double>(area);
      for (int b = 0; b < 256; ++b) {
        cdf += hist[static_cast<std::size_t>(b)];
        lut[static_cast<std::size_t>(b)] =
            static_cast<std::uint8_t>(std::clamp(std::lround(cdf * scale), 0L, 255L));
      }
    }
  }

  const double tile_w = static_cast<double>(w) / tx, tile_h = static_cast<double>(h) / ty;
  ByteRaster out(w, h);
  for (int n = 0; n < h; ++n) {
    const double fy = (n + 0.5) / tile_h - 0.5;
    int j1 = static_cast<int>(std::floor(fy));
    const double ya = fy - j1;
    int j2 = j1 + 1;
    j1 = std::max(j1, 0);
    j2 = std::min(j2, ty - 1);
    for (int m = 0; m < w; ++m) {
      const double fx = (m + 0.5) / tile_w - 0.5;
      int i1 = static_cast<int>(std::floor(fx));
      const double xa = fx - i1;
      int i2 = i1 + 1;
      i1 = std::max(i1, 0);
      i2 = std::min(i2, tx - 1);
      const std::uint8_t v = image.at(m, n);
      auto lut = [&](int i, int j) {
        return static_cast<double>(luts[static_cast<std::size_t>(j * tx + i)][v]);
      };
      const double top = lut(i1, j1) * (1.0 - xa) + lut(i2, j1) * xa;
      const double bottom = lut(i1, j2) * (1.0 - xa) + lut(i2, j2) * xa;
      out.at(m, n) = static_cast<std::uint8_t>(
          std::clamp(std::lround(top * (1.0 - ya) + bottom * ya), 0L, 255L));
    }
  }
  return out;
}

DensityGrid enhance(DensityGrid grid, const EnhanceParams& params) {
  const ByteRaster normalized = log_normalize(grid.counts);
  Raster<double> as_double(normalized.width(), normalized.height());
  std::copy(normalized.data().begin(), normalized.data().end(), as_double.data().begin());
  const Raster<double> blurred = gaussian_blur(as_double, params.blur_kernel, params.blur_sigma);
  ByteRaster rounded(blurred.width(), blurred.height());
  for (std::size_t i = 0; i < blurred.size(); ++i) {
    rounded.data()[i] =
        static_cast<std::uint8_t>(std::clamp(std::lround(blurred.data()[i]), 0L, 255L));
  }
  grid.enhanced = clahe(rounded, params.clahe_clip, params.clahe_tiles);
  return grid;
}

std::string frame_to_json(const ProjectionFrame& frame) {
  nlohmann::ordered_json j;
  j["x_min"] = frame.x_min;
  j["y_min"] = frame.y_min;
  j["pixel_size"] = frame.pixel_size;
  j["width"] = frame.width;
  j["height"] = frame.height;
  return j.dump(2) + "\n";
}

ProjectionFrame frame_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ProjectionFrame frame;
    frame.x_min = j.at("x_min").get<double>();
    frame.y_min = j.at("y_min").get<double>();
    frame.pixel_size = j.at("pixel_size").get<double>();
    frame.width = j.at("width").get<int>();
    frame.height = j.at("height").get<int>();
    if (!(frame.pixel_size > 0.0) || frame.width < 1 || frame.height < 1) {
      throw Error(ErrorCode::kDecodeFailure, "frame.json has non-positive size fields");
    }
    return frame;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kDecodeFailure, std::string("frame.json: ") + e.what());
  }
}

std::string frame_fingerprint(const std::string& frame_json_bytes) {
  return to_hex(fnv1a64(frame_json_bytes));
}

void export_density_png(const DensityGrid& grid, const std::filesystem::path& png_path,
                        const std::filesystem::path& frame_path) {
  if (!grid.enhanced) throw Error(ErrorCode::kEmptyRaster, "enhanced raster missing; run enhance");
  if (png_path.has_parent_path()) std::filesystem::create_directories(png_path.parent_path());
  write_png_gray(*grid.enhanced, png_path);
  write_text_file(frame_path, frame_to_json(grid.frame));
}

DensityGrid import_density_png(const std::filesystem::path& png_path,
                               const std::filesystem::path& frame_path) {
  DensityGrid grid;
  grid.frame = frame_from_json(read_text_file(frame_path));
  ByteRaster image = read_png_gray(png_path);
  if (image.width() != grid.frame.width || image.height() != grid.frame.height) {
    throw Error(ErrorCode::kFrameMismatch, "density.png size differs from frame.json");
  }
  grid.enhanced = std::move(image);
  return grid;
}

}  // namespace roomtrace
