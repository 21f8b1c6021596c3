// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0
//
// Coarse and fine selection of single-room masks from an over-complete
// candidate list. Masks are never modified; every stage keeps or discards
// candidates by index, and every tie is broken deterministically.
//
// Order: connectivity -> dedup -> area/point screen -> composite removal
//        -> grouping (report only) -> inclusion pruning -> greedy cover.

#ifndef ROOMTRACE_MASK_FILTER_HPP
#define ROOMTRACE_MASK_FILTER_HPP

#include <span>
#include <string>
#include <vector>

#include "roomtrace/raster.hpp"
#include "roomtrace/segmentation.hpp"

namespace roomtrace {

struct MaskStats {
  std::string id;
  std::size_t area_px{0};
  double area_m2{0.0};
  int component_count{0};
  int hole_count{0};
  std::size_t point_count{0};
};

/// 4-connected foreground components.
int count_components(const ByteRaster& mask);

/// 8-connected background components that do not touch the raster border.
int count_holes(const ByteRaster& mask);

/// counts may be empty, in which case point_count is 0.
MaskStats compute_stats(const MaskImage& mask, double pixel_size, const CountRaster& counts);

/// |a & b| / |a | b|, 0 for two empty masks. Throws DimensionMismatch.
double iou(const MaskImage& a, const MaskImage& b);

/// Pairwise intersection counts, computed once over bounding boxes.
class OverlapTable {
 public:
  explicit OverlapTable(std::span<const MaskImage> masks);

  [[nodiscard]] std::size_t size() const noexcept { return areas_.size(); }
  [[nodiscard]] std::size_t area(std::size_t i) const { return areas_[i]; }
  [[nodiscard]] std::size_t intersection(std::size_t i, std::size_t j) const {
    return inter_[i * areas_.size() + j];
  }
  [[nodiscard]] double iou(std::size_t i, std::size_t j) const;
  /// |i & j| / |j|: the share of j that lies inside i.
  [[nodiscard]] double containment(std::size_t i, std::size_t j) const;
  /// Pixels covered by at least one of the listed masks.
  [[nodiscard]] std::size_t union_area(std::span<const std::size_t> members) const;

 private:
  std::span<const MaskImage> masks_;
  std::vector<std::size_t> areas_;
  std::vector<std::size_t> inter_;
};

/// True when stats a ranks above b by (area_px, point_count, id).
bool ranks_above(const MaskStats& a, const MaskStats& b);

bool connectivity_screen(const MaskStats& stats, int max_holes = 2);

/// Clusters of the IoU >= thresh graph (transitive closure); one survivor
/// per cluster, the top-ranked member. Output keeps input order.
std::vector<std::size_t> dedup(const OverlapTable& table, std::span<const MaskStats> stats,
                               std::span<const std::size_t> candidates, double iou_thresh = 0.8);

/// Linear-interpolation (type 7) quantile of unsorted values; p in [0, 1].
double quantile(std::vector<double> values, double p);

/// Q75 + k * IQR, +inf for an empty list.
double area_upper_bound(std::vector<double> areas, double iqr_factor = 2.0);

struct AreaScreenParams {
  double min_scene_fraction{0.02};
  double min_area_m2{1.0};
  double iqr_factor{2.0};
  std::size_t min_points{50};
};

/// min_points scaled by (0.05 / s)^2 for pixel size s.
std::size_t scaled_min_points(std::size_t base, double pixel_size);

struct AreaScreenResult {
  std::vector<std::size_t> kept;
  double lower_bound{0.0};
  double upper_bound{0.0};
};

/// Keeps area_m2 >= max(fraction * scene, min_area), area_m2 <= Q75 + k * IQR
/// of the candidates clearing the lower bound, and point_count >= min_points.
AreaScreenResult area_point_screen(std::span<const MaskStats> stats, std::span<const std::size_t> candidates,
                                   double scene_area_m2, const AreaScreenParams& params,
                                   std::size_t min_points);

struct MaskGroup {
  std::vector<std::size_t> members;
  std::size_t representative{0};
  friend bool operator==(const MaskGroup&, const MaskGroup&) = default;
};

/// Connected components of the IoU >= thresh graph, ordered by first member.
std::vector<MaskGroup> group_masks(const OverlapTable& table, std::span<const MaskStats> stats,
                                   std::span<const std::size_t> candidates, double iou_thresh = 0.5);

/// Drops a candidate that contains (share >= incl_thresh) two or more
/// pairwise-disjoint candidates jointly covering >= part_cover of it.
std::vector<std::size_t> remove_composites(const OverlapTable& table, std::span<const MaskStats> stats,
                                           std::span<const std::size_t> candidates,
                                           double incl_thresh = 0.9, double part_cover = 0.8,
                                           double disjoint_iou = 0.01);

/// Visits candidates from the top rank down and discards one when a kept
/// candidate contains >= incl_thresh of it. Candidates whose area then
/// exceeds area_upper_bound over the survivors are discarded too.
/// Output keeps input order.
std::vector<std::size_t> inclusion_prune(const OverlapTable& table, std::span<const MaskStats> stats,
                                         std::span<const std::size_t> candidates,
                                         double incl_thresh = 0.9, double iqr_factor = 2.0);

struct CoverParams {
  double coverage{0.95};
  double iou_tol{0.01};
  /// Below this many candidates, a greedy result short of the coverage
  /// target is replaced by an exact search over overlap-feasible subsets.
  std::size_t exact_limit{20};
};

struct CoverResult {
  std::vector<std::size_t> selected;
  double coverage{0.0};
  bool below_target{false};
  bool exact{false};
};

/// Area-descending greedy under the pairwise IoU <= iou_tol gate; coverage
/// is the selected area sum over the union area of all candidates.
/// Throws NoCandidates.
CoverResult greedy_cover(const OverlapTable& table, std::span<const std::size_t> candidates,
                         const CoverParams& params = {});

struct MaskFilterParams {
  int max_holes{2};
  double dedup_iou{0.8};
  AreaScreenParams area{};
  double group_iou{0.5};
  double incl_thresh{0.9};
  double composite_cover{0.8};
  CoverParams cover{};
};

struct MaskDecision {
  std::string stage;   ///< stage that discarded the mask, or "selected"
  std::string reason;
};

struct FilterReport {
  std::vector<MaskStats> stats;
  std::vector<MaskDecision> decisions;
  std::vector<MaskGroup> groups;
  std::vector<std::size_t> selected;
  double scene_area_m2{0.0};
  double area_lower_bound{0.0};
  double area_upper_bound{0.0};
  double coverage{0.0};
  bool below_target{false};
};

/// Runs every stage. counts is the filtered cloud projected into the frame.
FilterReport filter_masks(std::span<const MaskImage> masks, const CountRaster& counts, double pixel_size,
                          double scene_area_m2, const MaskFilterParams& params = {});

std::string filter_report_to_json(const FilterReport& report);

}  // namespace roomtrace

#endif  // ROOMTRACE_MASK_FILTER_HPP
