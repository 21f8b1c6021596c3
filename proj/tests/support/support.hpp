// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared test helpers: brute-force oracles that recompute each module's
// contract from first principles, random instance generators, and a
// self-deleting temporary directory.

#ifndef ROOMTRACE_TESTS_SUPPORT_HPP
#define ROOMTRACE_TESTS_SUPPORT_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "roomtrace/ceiling_filter.hpp"
#include "roomtrace/contour.hpp"
#include "roomtrace/error.hpp"
#include "roomtrace/geometry.hpp"
#include "roomtrace/ingest.hpp"
#include "roomtrace/mask_filter.hpp"
#include "roomtrace/prompts.hpp"
#include "roomtrace/raster.hpp"
#include "roomtrace/segmentation.hpp"

namespace roomtrace::testing {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);
int uniform_int(Rng& rng, int lo, int hi);  // inclusive

/// Code of the roomtrace::Error thrown by f, nullopt when nothing is thrown.
std::optional<ErrorCode> thrown_code(const std::function<void()>& f);

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  [[nodiscard]] const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// ---- generators ----

/// Cloud of n points over a w x d footprint: a few height layers per
/// column (ceiling, clutter, floor) so many grid cells hold several levels.
PointCloud random_room_cloud(Rng& rng, std::size_t n, double w = 6.0, double d = 4.0);

/// Integer-valued raster with a few bright blobs and plateaus.
ByteRaster random_raster(Rng& rng, int width, int height);

/// Up to max_masks masks on a size x size grid: rectangles, near copies,
/// nested parts and unions, so every filter stage has work to do.
std::vector<MaskImage> random_mask_instance(Rng& rng, int size, int max_masks);

MaskStats stats_for(const MaskImage& mask, std::size_t point_count);

/// Rectangle with random rectangular notches cut from its corners, as a
/// CCW ring in meters before rotation.
std::vector<Vec2> random_rectilinear_room(Rng& rng);

/// Every edge split into pieces of roughly `step`, each vertex moved by
/// Gaussian noise, then the ring rotated by theta about the origin.
std::vector<Vec2> perturb_room(Rng& rng, const std::vector<Vec2>& ring, double step, double noise, double theta);

std::vector<Vec2> rotate_ring(const std::vector<Vec2>& ring, double theta);

struct RoomTrial {
  std::vector<Vec2> truth;  ///< rotated ground-truth ring
  double theta{0.0};        ///< main direction used for regularization
  RegularizeResult regularized;
  FuseResult fused;
};

/// One perturbed rectilinear room through rdp_simplify, main_direction,
/// regularize and fuse_correct. Boundary evidence is the rotated true walls
/// plus sparse interior points, all with the same noise.
RoomTrial regularize_perturbed_room(std::uint64_t seed, double noise = 0.01);

/// Largest angle between an edge and the nearest of theta, theta + pi/2.
double max_axis_deviation(const std::vector<Vec2>& ring, double theta);

// ---- oracles ----

/// Per-cell maximum by scanning all points for each point.
std::vector<std::size_t> oracle_ceiling_indices(const PointCloud& cloud, double gamma, double delta_z);

/// Neighbour azimuths by scanning all points; largest circular gap.
std::vector<bool> oracle_boundary_flags(const std::vector<Vec2>& points, double radius, double sector);

/// Pixels equal to their clipped pool x pool maximum with value >= tau.
std::vector<PromptPoint> oracle_peaks(const ByteRaster& image, int pool, double tau);

double oracle_iou(const ByteRaster& a, const ByteRaster& b);
/// |a & b| / |b|
double oracle_containment(const ByteRaster& a, const ByteRaster& b);

/// Components of the IoU >= thresh graph over candidates (positions into
/// `candidates`), each sorted, ordered by first member.
std::vector<std::vector<std::size_t>> oracle_components(const std::vector<MaskImage>& masks,
                                                        const std::vector<std::size_t>& candidates,
                                                        double thresh);

/// Largest (area, points, id) member.
std::size_t oracle_best(const std::vector<MaskStats>& stats, const std::vector<std::size_t>& members);

std::vector<std::size_t> oracle_dedup(const std::vector<MaskImage>& masks, const std::vector<MaskStats>& stats,
                                      const std::vector<std::size_t>& candidates, double thresh);

std::vector<MaskGroup> oracle_groups(const std::vector<MaskImage>& masks, const std::vector<MaskStats>& stats,
                                     const std::vector<std::size_t>& candidates, double thresh);

/// A candidate survives iff no surviving higher-ranked candidate contains
/// >= incl of it; survivors above Q75 + k * IQR of survivor areas drop.
std::vector<std::size_t> oracle_inclusion(const std::vector<MaskImage>& masks, const std::vector<MaskStats>& stats,
                                          const std::vector<std::size_t>& candidates, double incl, double iqr_factor);

/// Best coverage (selected area sum over union of candidates) among all
/// subsets whose members are pairwise IoU <= iou_tol.
double oracle_best_coverage(const std::vector<MaskImage>& masks, const std::vector<std::size_t>& candidates,
                            double iou_tol);

}  // namespace roomtrace::testing

#endif  // ROOMTRACE_TESTS_SUPPORT_HPP
