// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0
//
// Pipeline configuration: one INI file with a section per stage. Every key
// has a default, unknown keys are rejected, and to_ini() writes every key
// so a saved config reproduces a run exactly.

#ifndef ROOMTRACE_CONFIG_HPP
#define ROOMTRACE_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "roomtrace/ceiling_filter.hpp"
#include "roomtrace/contour.hpp"
#include "roomtrace/density.hpp"
#include "roomtrace/eval.hpp"
#include "roomtrace/mask_filter.hpp"
#include "roomtrace/prompts.hpp"
#include "roomtrace/segmentation.hpp"
#include "roomtrace/topology.hpp"

namespace roomtrace {

inline constexpr const char* kConfigEnvVar = "ROOMTRACE_CONFIG";

struct PipelineConfig {
  // [ingest]
  double voxel{0.0};  ///< 0 disables downsampling

  // [ceiling]
  CeilingFilterParams ceiling{};
  RansacParams ransac{};

  // [density]
  FrameParams frame{};
  std::size_t spacing_sample{10000};
  EnhanceParams enhance{};

  // [prompts]
  PeakParams peaks{};
  int min_dist_px{10};

  // [segmentation]
  SegmentParams segment{};

  // [mask_filter]
  MaskFilterParams mask_filter{};

  // [contour]
  double rdp_epsilon{0.0};
  double merge_factor{2.0};  ///< merge tolerance in pixels
  double skip_angle_deg{20.0};
  double skip_fraction{0.3};
  double boundary_radius{0.2};
  double boundary_sector_deg{30.0};
  double fuse_tau{0.05};
  double fuse_band{0.3};
  CorrectionMode fuse_mode{CorrectionMode::kPerEdge};
  double room_margin{0.15};

  // [topology]
  AdjacencyParams adjacency{};
  double door_bin_factor{2.0};  ///< bin width in pixels
  double door_density_ratio{0.2};
  double min_door{0.6};
  double max_door{2.0};
  double slab_margin{0.1};
  double door_band_lo{0.25};  ///< fraction of floor-to-ceiling height
  double door_band_hi{0.6};
  double overlap_factor{2.0};  ///< room overlap tolerance in pixels

  // [eval]
  EvalParams eval{};     ///< door_tol is derived from door_tol_bins
  double door_tol_bins{2.0};

  // [run]
  std::uint64_t seed{0};
};

/// Parses INI text; missing keys keep their defaults. Throws ConfigError.
PipelineConfig config_from_ini(const std::string& text);

/// Applies "section.key=value" overrides. Throws ConfigError.
void apply_overrides(PipelineConfig& config, const std::vector<std::string>& assignments);

/// Every key, sections in pipeline order, shortest round-trip numbers.
std::string config_to_ini(const PipelineConfig& config);

/// INI text of the sections a stage depends on, for cache keys.
std::string config_section(const PipelineConfig& config, const std::string& section);

/// Reads path, or $ROOMTRACE_CONFIG when path is empty, or defaults.
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace roomtrace

#endif  // ROOMTRACE_CONFIG_HPP
