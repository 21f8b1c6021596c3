// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0
//
// Stage runners and the end-to-end pipeline. Each stage reads its inputs
// from files and writes its outputs into one directory under fixed names,
// so any persisted intermediate can seed a later stage.
//
// run_pipeline places stage k in <out>/<NN>-<stage>-<key>, where key is the
// FNV-1a hash chaining the input bytes, the config sections every stage up
// to k depends on, and the stage names. A directory holding a "done" marker
// is reused instead of recomputed, except the runner_subprocess segment
// stage and every stage after it.

#ifndef ROOMTRACE_PIPELINE_HPP
#define ROOMTRACE_PIPELINE_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "roomtrace/config.hpp"
#include "roomtrace/eval.hpp"
#include "roomtrace/topology.hpp"

namespace roomtrace {

namespace files {
inline constexpr const char* kCloud = "cloud.ply";
inline constexpr const char* kFiltered = "filtered.ply";
inline constexpr const char* kCeiling = "ceiling.ply";
inline constexpr const char* kPlane = "plane.json";
inline constexpr const char* kDensityPng = "density.png";
inline constexpr const char* kFrame = "frame.json";
inline constexpr const char* kDensityInfo = "density.json";
inline constexpr const char* kPrompts = "prompts.json";
inline constexpr const char* kMasks = "masks";
inline constexpr const char* kSelected = "selected";
inline constexpr const char* kFilterReport = "filter-report.json";
inline constexpr const char* kRooms = "rooms.json";
inline constexpr const char* kTraces = "traces";
inline constexpr const char* kFloorplan = "floorplan.json";
inline constexpr const char* kFloorplanSvg = "floorplan.svg";
inline constexpr const char* kEval = "eval.json";
inline constexpr const char* kDone = "done";
}  // namespace files

/// Reads any supported cloud, applies the voxel filter, writes cloud.ply.
/// Throws EmptyCloud.
void run_ingest_stage(const std::filesystem::path& input, const std::filesystem::path& out,
                      const PipelineConfig& config);

/// cloud.ply -> filtered.ply, ceiling.ply (RANSAC inliers of the filtered
/// cloud) and plane.json.
void run_ceiling_stage(const std::filesystem::path& cloud_ply, const std::filesystem::path& out,
                       const PipelineConfig& config);

/// filtered.ply -> density.png, frame.json and density.json (point spacing).
void run_density_stage(const std::filesystem::path& filtered_ply, const std::filesystem::path& out,
                       const PipelineConfig& config);

/// density stage dir -> prompts.json.
void run_prompts_stage(const std::filesystem::path& density_dir, const std::filesystem::path& out,
                       const PipelineConfig& config);

/// density and prompts -> masks/ (PNGs plus manifest.json).
void run_segment_stage(const std::filesystem::path& density_dir, const std::filesystem::path& prompts_json,
                       const std::filesystem::path& out, const PipelineConfig& config);

/// masks dir + filtered cloud + frame -> selected/ and filter-report.json.
void run_filter_stage(const std::filesystem::path& masks_dir, const std::filesystem::path& filtered_ply,
                      const std::filesystem::path& density_dir, const std::filesystem::path& out,
                      const PipelineConfig& config);

/// Selected masks + ceiling points -> rooms.json and traces/<room>/ with
/// room.json and contour_{raw,rdp,reg,final}.json.
/// Rooms whose contour cannot be built are dropped with a warning.
void run_contour_stage(const std::filesystem::path& selected_dir, const std::filesystem::path& ceiling_ply,
                       const std::filesystem::path& density_dir, const std::filesystem::path& out,
                       const PipelineConfig& config);

/// rooms.json + ingest cloud -> floorplan.json and floorplan.svg.
FloorPlan run_topology_stage(const std::filesystem::path& rooms_json, const std::filesystem::path& cloud_ply,
                             const std::filesystem::path& out, const PipelineConfig& config);

/// floorplan.json + gt.json -> eval report written to out_json.
EvalReport run_eval_stage(const std::filesystem::path& floorplan_json, const std::filesystem::path& gt_json,
                          const std::filesystem::path& out_json, const PipelineConfig& config);

/// Points of the cloud between band_lo and band_hi of its z range.
PointCloud height_band(const PointCloud& cloud, double band_lo, double band_hi);

struct PipelineOptions {
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> ground_truth;
  bool resume{true};
};

struct StageRecord {
  std::string name;
  std::filesystem::path dir;
  bool reused{false};
};

struct PipelineResult {
  FloorPlan plan;
  std::optional<EvalReport> eval;
  std::vector<StageRecord> stages;
};

/// Runs every stage; floorplan.json, floorplan.svg, config.ini and, with
/// ground truth, eval.json are also copied to out_dir. Errors carry the
/// failing stage's name.
PipelineResult run_pipeline(const PipelineConfig& config, const std::filesystem::path& input,
                            const PipelineOptions& options);

}  // namespace roomtrace

#endif  // ROOMTRACE_PIPELINE_HPP
