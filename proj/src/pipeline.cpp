// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "roomtrace/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <json.hpp>

#include "roomtrace/ceiling_filter.hpp"
#include "roomtrace/contour.hpp"
#include "roomtrace/density.hpp"
#include "roomtrace/error.hpp"
#include "roomtrace/file_io.hpp"
#include "roomtrace/hash.hpp"
#include "roomtrace/ingest.hpp"
#include "roomtrace/mask_filter.hpp"
#include "roomtrace/prompts.hpp"
#include "roomtrace/segmentation.hpp"
#include "roomtrace/svg.hpp"

namespace roomtrace {
namespace fs = std::filesystem;

namespace {

nlohmann::ordered_json ring_json(const std::vector<Vec2>& ring) {
  auto out = nlohmann::ordered_json::array();
  for (const Vec2& v : ring) out.push_back(nlohmann::ordered_json::array({v.x, v.y}));
  return out;
}

double load_spacing(const fs::path& density_dir) {
  try {
    return nlohmann::json::parse(read_text_file(density_dir / files::kDensityInfo)).at("spacing").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kDecodeFailure, std::string("density.json: ") + e.what());
  }
}

// Summed-area table over a 0/1 mask for box queries.
class BoxCounter {
 public:
  explicit BoxCounter(const ByteRaster& mask)
      : w_(mask.width()), h_(mask.height()), sum_(static_cast<std::size_t>(w_ + 1) * static_cast<std::size_t>(h_ + 1), 0) {
    for (int n = 0; n < h_; ++n) {
      for (int m = 0; m < w_; ++m) {
        at(m + 1, n + 1) = (mask.at(m, n) ? 1 : 0) + at(m, n + 1) + at(m + 1, n) - at(m, n);
      }
    }
  }

  /// True when any pixel within Chebyshev distance r of (m, n) is set.
  [[nodiscard]] bool any_near(int m, int n, int r) const {
    const int m0 = std::max(0, m - r), m1 = std::min(w_ - 1, m + r);
    const int n0 = std::max(0, n - r), n1 = std::min(h_ - 1, n + r);
    if (m0 > m1 || n0 > n1) return false;
    return at(m1 + 1, n1 + 1) - at(m0, n1 + 1) - at(m1 + 1, n0) + at(m0, n0) > 0;
  }

 private:
  std::int64_t& at(int m, int n) { return sum_[static_cast<std::size_t>(n) * static_cast<std::size_t>(w_ + 1) + static_cast<std::size_t>(m)]; }
  [[nodiscard]] std::int64_t at(int m, int n) const {
    return sum_[static_cast<std::size_t>(n) * static_cast<std::size_t>(w_ + 1) + static_cast<std::size_t>(m)];
  }

  int w_;
  int h_;
  std::vector<std::int64_t> sum_;
};

ContourParams contour_params(const PipelineConfig& c, double pixel_size) {
  ContourParams p;
  p.rdp_epsilon = c.rdp_epsilon;
  p.regularize.merge_tol = c.merge_factor * pixel_size;
  p.regularize.skip_angle = deg_to_rad(c.skip_angle_deg);
  p.regularize.skip_fraction = c.skip_fraction;
  p.fuse.tau = c.fuse_tau;
  p.fuse.band = c.fuse_band;
  p.fuse.mode = c.fuse_mode;
  p.boundary_radius = c.boundary_radius;
  p.boundary_sector_deg = c.boundary_sector_deg;
  return p;
}

bool recoverable_contour_error(ErrorCode code) {
  return code == ErrorCode::kMultipleComponents || code == ErrorCode::kDegenerateGeometry ||
         code == ErrorCode::kDegenerateAfterMerge;
}

}  // namespace

void run_ingest_stage(const fs::path& input, const fs::path& out, const PipelineConfig& config) {
  PointCloud cloud = read_point_cloud(input);
  cloud.require_non_empty("ingest");
  if (config.voxel > 0.0) cloud = voxel_downsample(cloud, config.voxel);
  fs::create_directories(out);
  write_ply_binary(cloud, out / files::kCloud);
  spdlog::info("ingest: {} points", cloud.size());
}

void run_ceiling_stage(const fs::path& cloud_ply, const fs::path& out, const PipelineConfig& config) {
  const PointCloud cloud = read_point_cloud(cloud_ply);
  cloud.require_non_empty("ceiling");
  const PointCloud filtered = grid_ceiling_filter(cloud, config.ceiling);
  RansacParams ransac = config.ransac;
  ransac.seed = config.seed;
  const PlaneModel plane = ransac_plane(filtered, ransac);
  std::vector<Point3> inliers;
  inliers.reserve(plane.inliers.size());
  for (std::size_t i : plane.inliers) inliers.push_back(filtered[i]);

  fs::create_directories(out);
  write_ply_binary(filtered, out / files::kFiltered);
  write_ply_binary(PointCloud(std::move(inliers)), out / files::kCeiling);
  nlohmann::ordered_json j;
  j["normal"] = plane.normal;
  j["d"] = plane.d;
  j["inliers"] = plane.inliers.size();
  write_text_file(out / files::kPlane, j.dump(2) + "\n");
  spdlog::info("ceiling: kept {} of {} points, plane inliers {}", filtered.size(), cloud.size(), plane.inliers.size());
}

void run_density_stage(const fs::path& filtered_ply, const fs::path& out, const PipelineConfig& config) {
  const PointCloud filtered = read_point_cloud(filtered_ply);
  filtered.require_non_empty("density");
  const double spacing = estimate_point_spacing(filtered, config.spacing_sample);
  const ProjectionFrame frame = compute_frame(filtered.bounds(), spacing, config.frame);
  DensityGrid grid = enhance(project_density(filtered, frame), config.enhance);
  fs::create_directories(out);
  export_density_png(grid, out / files::kDensityPng, out / files::kFrame);
  nlohmann::ordered_json j;
  j["spacing"] = spacing;
  j["raw_resolution"] = raw_resolution(filtered.bounds(), spacing, config.frame.kappa);
  j["points"] = filtered.size();
  write_text_file(out / files::kDensityInfo, j.dump(2) + "\n");
  spdlog::info("density: spacing {:.4f} m, {}x{} px at {:.4f} m", spacing, frame.width, frame.height, frame.pixel_size);
}

void run_prompts_stage(const fs::path& density_dir, const fs::path& out, const PipelineConfig& config) {
  const DensityGrid grid = import_density_png(density_dir / files::kDensityPng, density_dir / files::kFrame);
  const PromptSet prompts = extract_prompts(*grid.enhanced, config.peaks, config.min_dist_px);
  fs::create_directories(out);
  write_text_file(out / files::kPrompts, prompts_to_json(prompts));
  spdlog::info("prompts: {} points above tau {:.2f}", prompts.points.size(), prompts.tau);
}

void run_segment_stage(const fs::path& density_dir, const fs::path& prompts_json, const fs::path& out,
                       const PipelineConfig& config) {
  fs::create_directories(out);
  const SegmentInputs inputs{density_dir / files::kDensityPng, density_dir / files::kFrame, prompts_json};
  const fs::path runner_out = out / "runner";
  const auto masks = segment(inputs, config.segment, runner_out);
  write_mask_dir(out / files::kMasks, masks, backend_name(config.segment.backend), read_text_file(inputs.frame_json));
  spdlog::info("segment: {} masks from the {} backend", masks.size(), backend_name(config.segment.backend));
}

void run_filter_stage(const fs::path& masks_dir, const fs::path& filtered_ply, const fs::path& density_dir,
                      const fs::path& out, const PipelineConfig& config) {
  const std::string frame_bytes = read_text_file(density_dir / files::kFrame);
  const ProjectionFrame frame = frame_from_json(frame_bytes);
  const auto masks = load_mask_dir(masks_dir, frame_bytes);
  const DensityGrid grid = project_density(read_point_cloud(filtered_ply), frame);
  const FilterReport report = filter_masks(masks, grid.counts, frame.pixel_size, frame.area_m2(), config.mask_filter);
  if (report.below_target) spdlog::warn("filter: coverage {:.3f} is below target", report.coverage);
  std::vector<MaskImage> selected;
  for (std::size_t i : report.selected) selected.push_back(masks[i]);
  fs::create_directories(out);
  write_text_file(out / files::kFilterReport, filter_report_to_json(report));
  write_mask_dir(out / files::kSelected, selected, "filtered", frame_bytes);
  spdlog::info("filter: selected {} of {} masks, coverage {:.3f}", selected.size(), masks.size(), report.coverage);
}

void run_contour_stage(const fs::path& selected_dir, const fs::path& ceiling_ply, const fs::path& density_dir,
                       const fs::path& out, const PipelineConfig& config) {
  const std::string frame_bytes = read_text_file(density_dir / files::kFrame);
  const ProjectionFrame frame = frame_from_json(frame_bytes);
  const double spacing = load_spacing(density_dir);
  const auto masks = load_mask_dir(selected_dir, frame_bytes);
  const ContourParams params = contour_params(config, frame.pixel_size);

  const PointCloud ceiling = read_point_cloud(ceiling_ply);
  std::vector<Vec2> planar;
  planar.reserve(ceiling.size());
  for (const Point3& p : ceiling) planar.push_back({p.x, p.y});
  const BoundaryPointSet all_boundary =
      extract_boundary_points(planar, config.boundary_radius, deg_to_rad(config.boundary_sector_deg));
  const int margin_px = static_cast<int>(std::ceil(config.room_margin / frame.pixel_size));

  fs::create_directories(out / files::kTraces);
  std::vector<RoomContour> rooms;
  for (const MaskImage& mask : masks) {
    char id[16];
    std::snprintf(id, sizeof id, "room_%03zu", rooms.size());
    BoundaryPointSet boundary;
    boundary.radius = all_boundary.radius;
    boundary.sector_rad = all_boundary.sector_rad;
    const BoxCounter near(mask.pixels);
    for (const Vec2& p : all_boundary.points) {
      const auto px = frame.pixel_of(p.x, p.y);
      if (px && near.any_near(px->first, px->second, margin_px)) boundary.points.push_back(p);
    }
    ContourTrace trace;
    try {
      RoomContour room = extract_room_contour(mask, frame, boundary, spacing, params, &trace);
      room.id = id;
      const fs::path dir = out / files::kTraces / room.id;
      nlohmann::ordered_json info;
      info["id"] = room.id;
      info["mask"] = mask.id;
      info["boundary_points"] = boundary.points.size();
      info["theta_main"] = room.theta_main;
      info["regularized"] = room.regularized;
      info["snapped_vertices"] = room.snapped_vertices;
      write_text_file(dir / "room.json", info.dump(2) + "\n");
      write_text_file(dir / "contour_raw.json", ring_json(trace.raw).dump() + "\n");
      write_text_file(dir / "contour_rdp.json", ring_json(trace.simplified).dump() + "\n");
      write_text_file(dir / "contour_reg.json", ring_json(trace.regularized).dump() + "\n");
      write_text_file(dir / "contour_final.json", ring_json(trace.final_polygon).dump() + "\n");
      rooms.push_back(std::move(room));
    } catch (const Error& e) {
      if (!recoverable_contour_error(e.code())) throw;
      spdlog::warn("contour: dropping mask {}: {}", mask.id, e.what());
    }
  }
  FloorPlan partial;
  partial.frame = frame;
  partial.rooms = std::move(rooms);
  write_text_file(out / files::kRooms, floorplan_to_json(partial));
  spdlog::info("contour: {} rooms, {} boundary points", partial.rooms.size(), all_boundary.points.size());
}

PointCloud height_band(const PointCloud& cloud, double band_lo, double band_hi) {
  const Bounds3& b = cloud.bounds();
  const double z0 = b.z_min + band_lo * (b.z_max - b.z_min);
  const double z1 = b.z_min + band_hi * (b.z_max - b.z_min);
  std::vector<Point3> out;
  for (const Point3& p : cloud) {
    if (p.z >= z0 && p.z <= z1) out.push_back(p);
  }
  return PointCloud(std::move(out));
}

FloorPlan run_topology_stage(const fs::path& rooms_json, const fs::path& cloud_ply, const fs::path& out,
                             const PipelineConfig& config) {
  const FloorPlan partial = floorplan_from_json(read_text_file(rooms_json));
  const double s = partial.frame.pixel_size;
  const PointCloud cloud = read_point_cloud(cloud_ply);
  cloud.require_non_empty("topology");
  const PointCloud band = height_band(cloud, config.door_band_lo, config.door_band_hi);

  DoorParams door_params;
  door_params.bin_width = config.door_bin_factor * s;
  door_params.density_ratio = config.door_density_ratio;
  door_params.min_door = config.min_door;
  door_params.max_door = config.max_door;
  door_params.slab_margin = config.slab_margin;

  std::vector<DoorSegment> doors;
  for (const AdjacentPair& pair : find_adjacent_segments(partial.rooms, config.adjacency)) {
    if (auto door = detect_door(pair, partial.rooms, band, door_params)) doors.push_back(*door);
  }
  FloorPlan plan = assemble_floorplan(partial.frame, partial.rooms, std::move(doors), config.overlap_factor * s);
  fs::create_directories(out);
  write_text_file(out / files::kFloorplan, floorplan_to_json(plan));
  write_text_file(out / files::kFloorplanSvg, render_svg(plan));
  spdlog::info("topology: {} rooms, {} doors", plan.rooms.size(), plan.doors.size());
  return plan;
}

EvalReport run_eval_stage(const fs::path& floorplan_json, const fs::path& gt_json, const fs::path& out_json,
                          const PipelineConfig& config) {
  const FloorPlan plan = floorplan_from_json(read_text_file(floorplan_json));
  const GroundTruth gt = ground_truth_from_json(read_text_file(gt_json));
  EvalParams params = config.eval;
  params.door_tol = config.door_tol_bins * config.door_bin_factor * plan.frame.pixel_size;
  const EvalReport report = evaluate(plan, gt, params);
  write_text_file(out_json, eval_report_to_json(report, plan));
  spdlog::info("eval: rooms {}/{}, boundary precision {:.3f} recall {:.3f}, doors {}/{}", report.room_true,
               report.room_gt, report.boundaries.precision, report.boundaries.recall, report.doors.door_true,
               report.doors.door_gt);
  return report;
}

PipelineResult run_pipeline(const PipelineConfig& config, const fs::path& input, const PipelineOptions& options) {
  PipelineResult result;
  std::uint64_t key = 0;
  try {
    key = fnv1a64(read_text_file(input));
  } catch (const Error& e) {
    throw e.with_stage("ingest");
  }

  int index = 0;
  bool downstream_stale = false;
  // Runs body in a content-addressed directory unless a finished one exists.
  auto stage = [&](const std::string& name, const std::string& key_material,
                   const std::function<void(const fs::path&)>& body, bool cacheable = true) -> fs::path {
    key = fnv1a64(name + "\n" + key_material, key);
    char prefix[16];
    std::snprintf(prefix, sizeof prefix, "%02d", ++index);
    const fs::path dir = options.out_dir / (std::string(prefix) + "-" + name + "-" + to_hex(key));
    const bool reuse = options.resume && cacheable && !downstream_stale && fs::exists(dir / files::kDone);
    // Keys do not cover an uncacheable stage's output, so nothing after it is reused.
    if (!cacheable) downstream_stale = true;
    if (!reuse) {
      const auto t0 = std::chrono::steady_clock::now();
      std::error_code ec;
      fs::remove_all(dir, ec);
      try {
        body(dir);
      } catch (const Error& e) {
        throw e.with_stage(name);
      }
      write_text_file(dir / files::kDone, "");
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      spdlog::debug("{} took {:.3f} s", name, secs);
    } else {
      spdlog::info("{}: reusing {}", name, dir.string());
    }
    result.stages.push_back({name, dir, reuse});
    return dir;
  };

  const fs::path ingest = stage("ingest", config_section(config, "ingest"),
                                [&](const fs::path& d) { run_ingest_stage(input, d, config); });
  const fs::path ceiling =
      stage("ceiling", config_section(config, "ceiling") + config_section(config, "run"),
            [&](const fs::path& d) { run_ceiling_stage(ingest / files::kCloud, d, config); });
  const fs::path density = stage("density", config_section(config, "density"), [&](const fs::path& d) {
    run_density_stage(ceiling / files::kFiltered, d, config);
  });
  const fs::path prompts = stage("prompts", config_section(config, "prompts"),
                                 [&](const fs::path& d) { run_prompts_stage(density, d, config); });
  std::string segment_material = config_section(config, "segmentation");
  if (config.segment.backend == SegmentBackend::kExternalDir) {
    std::error_code ec;
    if (fs::exists(config.segment.external_dir / "manifest.json", ec)) {
      segment_material += read_text_file(config.segment.external_dir / "manifest.json");
    }
  }
  // A subprocess may change between runs; its output is never reused.
  const bool runner = config.segment.backend == SegmentBackend::kRunnerSubprocess;
  const fs::path masks = stage(
      "segment", segment_material,
      [&](const fs::path& d) { run_segment_stage(density, prompts / files::kPrompts, d, config); }, !runner);
  const fs::path filtered = stage("filter", config_section(config, "mask_filter"), [&](const fs::path& d) {
    run_filter_stage(masks / files::kMasks, ceiling / files::kFiltered, density, d, config);
  });
  const fs::path contour = stage("contour", config_section(config, "contour"), [&](const fs::path& d) {
    run_contour_stage(filtered / files::kSelected, ceiling / files::kCeiling, density, d, config);
  });
  const fs::path topology = stage("topology", config_section(config, "topology"), [&](const fs::path& d) {
    run_topology_stage(contour / files::kRooms, ingest / files::kCloud, d, config);
  });

  try {
    result.plan = floorplan_from_json(read_text_file(topology / files::kFloorplan));
    write_text_file(options.out_dir / files::kFloorplan, read_text_file(topology / files::kFloorplan));
    write_text_file(options.out_dir / files::kFloorplanSvg, read_text_file(topology / files::kFloorplanSvg));
    write_text_file(options.out_dir / "config.ini", config_to_ini(config));
  } catch (const Error& e) {
    throw e.with_stage("topology");
  }
  if (options.ground_truth) {
    try {
      result.eval = run_eval_stage(options.out_dir / files::kFloorplan, *options.ground_truth,
                                   options.out_dir / files::kEval, config);
    } catch (const Error& e) {
      throw e.with_stage("eval");
    }
  }
  return result;
}

}  // namespace roomtrace
