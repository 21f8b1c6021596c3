// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0
//
// roomtrace command line: one subcommand per pipeline stage plus run, synth
// and render. Exit codes: 0 success, 2 configuration error, 3 stage failure.

#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "roomtrace/ceiling_filter.hpp"
#include "roomtrace/config.hpp"
#include "roomtrace/density.hpp"
#include "roomtrace/error.hpp"
#include "roomtrace/eval.hpp"
#include "roomtrace/file_io.hpp"
#include "roomtrace/ingest.hpp"
#include "roomtrace/pipeline.hpp"
#include "roomtrace/segmentation.hpp"
#include "roomtrace/svg.hpp"
#include "roomtrace/synthetic.hpp"

namespace fs = std::filesystem;
using namespace roomtrace;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

struct GlobalFlags {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<double> gamma;
  std::optional<double> delta_z;
  std::optional<double> ransac_thresh;
  std::optional<int> ransac_iters;
  std::optional<std::uint64_t> seed;
  bool verbose{false};
  bool quiet{false};
  bool print_config{false};
};

PipelineConfig resolve_config(const GlobalFlags& g) {
  PipelineConfig config = load_config(g.config_path);
  apply_overrides(config, g.overrides);
  if (g.gamma) config.ceiling.gamma = *g.gamma;
  if (g.delta_z) config.ceiling.delta_z = *g.delta_z;
  if (g.ransac_thresh) config.ransac.dist_thresh = *g.ransac_thresh;
  if (g.ransac_iters) config.ransac.max_iters = *g.ransac_iters;
  if (g.seed) config.seed = *g.seed;
  // Round trip so flag values pass the same validation as file values.
  return config_from_ini(config_to_ini(config));
}

// Ground-truth room masks registered to the frame the pipeline computes.
void write_truth_masks(const SyntheticResult& scene, const fs::path& out, const PipelineConfig& config) {
  const PointCloud filtered = grid_ceiling_filter(scene.cloud, config.ceiling);
  const double spacing = estimate_point_spacing(filtered, config.spacing_sample);
  const ProjectionFrame frame = compute_frame(filtered.bounds(), spacing, config.frame);
  const std::string frame_bytes = frame_to_json(frame);
  write_text_file(out / "truth" / files::kFrame, frame_bytes);
  std::vector<MaskImage> masks;
  for (std::size_t i = 0; i < scene.truth.rooms.size(); ++i) {
    MaskImage m;
    m.id = "gt_" + std::to_string(i);
    m.pixels = rasterize_polygon(scene.truth.rooms[i], frame);
    if (m.area() > 0) masks.push_back(std::move(m));
  }
  write_mask_dir(out / "truth" / files::kMasks, masks, "truth", frame_bytes);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"roomtrace: floorplans from indoor point clouds"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("-c,--config", g.config_path, "INI config (default: $ROOMTRACE_CONFIG)");
  app.add_option("--set", g.overrides, "Override a config value, section.key=value")->take_all();
  app.add_option("--gamma", g.gamma, "Ceiling grid cell size (m)");
  app.add_option("--delta-z", g.delta_z, "Ceiling height tolerance (m)");
  app.add_option("--ransac-thresh", g.ransac_thresh, "RANSAC inlier distance (m)");
  app.add_option("--ransac-iters", g.ransac_iters, "RANSAC iterations");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_flag("-v,--verbose", g.verbose, "Debug logging");
  app.add_flag("-q,--quiet", g.quiet, "Warnings and errors only");
  app.add_flag("--print-config", g.print_config, "Print the effective config before running");

  std::string input, out, aux1, aux2, aux3;
  bool no_resume = false, grid = false, truth_masks = false;

  auto* ingest = app.add_subcommand("ingest", "Read and downsample a cloud into <out>/cloud.ply");
  ingest->add_option("input", input, "Point cloud (.ply, .xyz)")->required();
  ingest->add_option("-o,--out", out, "Output directory")->required();

  auto* ceiling = app.add_subcommand("filter-ceiling", "Grid ceiling filter and ceiling plane");
  ceiling->add_option("cloud", input, "cloud.ply")->required();
  ceiling->add_option("-o,--out", out, "Output directory")->required();

  auto* density = app.add_subcommand("density", "Density map, frame.json and density.png");
  density->add_option("filtered", input, "filtered.ply")->required();
  density->add_option("-o,--out", out, "Output directory")->required();

  auto* prompts = app.add_subcommand("prompts", "Prompt points from a density directory");
  prompts->add_option("density_dir", input, "Directory with density.png and frame.json")->required();
  prompts->add_option("-o,--out", out, "Output directory")->required();

  auto* seg = app.add_subcommand("segment", "Candidate room masks");
  seg->add_option("density_dir", input, "Directory with density.png and frame.json")->required();
  seg->add_option("--prompts", aux1, "prompts.json")->required();
  seg->add_option("-o,--out", out, "Output directory")->required();

  auto* fm = app.add_subcommand("filter-masks", "Select room masks");
  fm->add_option("masks_dir", input, "Mask directory with manifest.json")->required();
  fm->add_option("--filtered", aux1, "filtered.ply")->required();
  fm->add_option("--density", aux2, "Density directory")->required();
  fm->add_option("-o,--out", out, "Output directory")->required();

  auto* contour = app.add_subcommand("contour", "Regularized room polygons");
  contour->add_option("selected_dir", input, "Selected mask directory")->required();
  contour->add_option("--ceiling", aux1, "ceiling.ply")->required();
  contour->add_option("--density", aux2, "Density directory")->required();
  contour->add_option("-o,--out", out, "Output directory")->required();

  auto* topo = app.add_subcommand("topology", "Doors and the final floor plan");
  topo->add_option("rooms", input, "rooms.json")->required();
  topo->add_option("--cloud", aux1, "cloud.ply from ingest")->required();
  topo->add_option("-o,--out", out, "Output directory")->required();

  auto* ev = app.add_subcommand("eval", "Compare a floor plan with ground truth");
  ev->add_option("floorplan", input, "floorplan.json")->required();
  ev->add_option("--gt", aux1, "gt.json")->required();
  ev->add_option("-o,--out", out, "Report path")->required();

  auto* run = app.add_subcommand("run", "Full pipeline with cached stages");
  run->add_option("input", input, "Point cloud")->required();
  run->add_option("-o,--out", out, "Output directory")->required();
  run->add_option("--gt", aux1, "gt.json to evaluate against");
  run->add_flag("--no-resume", no_resume, "Recompute every stage");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene");
  auto* scene_opt = synth->add_option("--scene", aux1, "Scene JSON");
  synth->add_option("--builtin", aux2, "Built-in scene name")->excludes(scene_opt);
  synth->add_option("--points", aux3, "Override total_points");
  synth->add_flag("--truth-masks", truth_masks, "Also write truth masks on the pipeline frame");
  synth->add_option("-o,--out", out, "Output directory")->required();

  auto* render = app.add_subcommand("render", "Render floorplan.json to SVG");
  render->add_option("floorplan", input, "floorplan.json")->required();
  render->add_option("-o,--out", out, "SVG path")->required();
  render->add_flag("--grid", grid, "Draw a 1 m grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  spdlog::set_level(g.verbose ? spdlog::level::debug : g.quiet ? spdlog::level::warn : spdlog::level::info);

  PipelineConfig config;
  try {
    config = resolve_config(g);
  } catch (const Error& e) {
    spdlog::error("{}: {}", to_string(e.code()), e.what());
    return kExitConfig;
  }
  if (g.print_config) std::cout << config_to_ini(config);

  try {
    if (*ingest) {
      run_ingest_stage(input, out, config);
    } else if (*ceiling) {
      run_ceiling_stage(input, out, config);
    } else if (*density) {
      run_density_stage(input, out, config);
    } else if (*prompts) {
      run_prompts_stage(input, out, config);
    } else if (*seg) {
      run_segment_stage(input, aux1, out, config);
    } else if (*fm) {
      run_filter_stage(input, aux1, aux2, out, config);
    } else if (*contour) {
      run_contour_stage(input, aux1, aux2, out, config);
    } else if (*topo) {
      run_topology_stage(input, aux1, out, config);
    } else if (*ev) {
      run_eval_stage(input, aux1, out, config);
    } else if (*run) {
      PipelineOptions options;
      options.out_dir = out;
      options.resume = !no_resume;
      if (!aux1.empty()) options.ground_truth = fs::path(aux1);
      run_pipeline(config, input, options);
    } else if (*synth) {
      if (aux1.empty() && aux2.empty()) {
        spdlog::error("synth needs --scene or --builtin");
        return kExitConfig;
      }
      SyntheticScene scene = aux1.empty() ? builtin_scene(aux2) : scene_from_json(read_text_file(aux1));
      if (g.seed) scene.seed = *g.seed;
      if (!aux3.empty()) scene.total_points = static_cast<std::size_t>(std::stoull(aux3));
      const SyntheticResult result = generate_synthetic(scene);
      fs::create_directories(out);
      write_ply_binary(result.cloud, fs::path(out) / "cloud.ply");
      write_text_file(fs::path(out) / "gt.json", ground_truth_to_json(result.truth));
      write_text_file(fs::path(out) / "scene.json", scene_to_json(scene));
      if (truth_masks) write_truth_masks(result, out, config);
      spdlog::info("synth: {} points, {} rooms, {} doors", result.cloud.size(), scene.rooms.size(), scene.doors.size());
    } else if (*render) {
      SvgParams params;
      params.grid = grid;
      write_text_file(out, render_svg(floorplan_from_json(read_text_file(input)), params));
    }
  } catch (const Error& e) {
    const std::string stage = e.stage().empty() ? "" : " [" + e.stage() + "]";
    spdlog::error("{}{}: {}", to_string(e.code()), stage, e.what());
    return e.code() == ErrorCode::kConfigError ? kExitConfig : kExitStage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitStage;
  }
  return 0;
}
