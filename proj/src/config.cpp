// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "roomtrace/config.hpp"

#include <array>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdlib>
#include <functional>
#include <sstream>

#include "roomtrace/error.hpp"
#include "roomtrace/file_io.hpp"

namespace roomtrace {
namespace {

struct Field {
  std::string section;
  std::string key;
  std::function<std::string()> get;
  std::function<void(const std::string&)> set;
};

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& name, const std::string& value, const std::string& expected) {
  throw Error(ErrorCode::kConfigError, name + ": expected " + expected + ", got '" + value + "'");
}

template <typename T>
T parse_number(const std::string& name, const std::string& raw) {
  const std::string value = trim(raw);
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || value.empty()) bad_value(name, value, "a number");
  return out;
}

Field number_field(const std::string& section, const std::string& key, double& ref) {
  const std::string name = section + "." + key;
  return {section, key, [&ref] { return format_double(ref); },
          [&ref, name](const std::string& v) { ref = parse_number<double>(name, v); }};
}

template <typename Int>
Field integer_field(const std::string& section, const std::string& key, Int& ref) {
  const std::string name = section + "." + key;
  return {section, key, [&ref] { return std::to_string(ref); },
          [&ref, name](const std::string& v) { ref = parse_number<Int>(name, v); }};
}

Field choice_field(const std::string& section, const std::string& key, std::function<std::string()> get,
                   std::function<void(const std::string&)> set) {
  return {section, key, std::move(get), std::move(set)};
}

Field string_field(const std::string& section, const std::string& key, std::string& ref) {
  return {section, key, [&ref] { return ref; }, [&ref](const std::string& v) { ref = trim(v); }};
}

std::vector<Field> fields(PipelineConfig& c) {
  std::vector<Field> f;
  f.push_back(number_field("ingest", "voxel", c.voxel));

  f.push_back(number_field("ceiling", "gamma", c.ceiling.gamma));
  f.push_back(number_field("ceiling", "delta_z", c.ceiling.delta_z));
  f.push_back(choice_field(
      "ceiling", "max_mode", [&c] { return std::string(c.ceiling.mode == CeilingMaxMode::kPerCell ? "per_cell" : "global"); },
      [&c](const std::string& raw) {
        const std::string v = trim(raw);
        if (v == "per_cell") c.ceiling.mode = CeilingMaxMode::kPerCell;
        else if (v == "global") c.ceiling.mode = CeilingMaxMode::kGlobal;
        else bad_value("ceiling.max_mode", v, "per_cell or global");
      }));
  f.push_back(number_field("ceiling", "ransac_thresh", c.ransac.dist_thresh));
  f.push_back(integer_field("ceiling", "ransac_iters", c.ransac.max_iters));

  f.push_back(number_field("density", "kappa", c.frame.kappa));
  f.push_back(integer_field("density", "r_min", c.frame.r_min));
  f.push_back(integer_field("density", "r_max", c.frame.r_max));
  f.push_back(integer_field("density", "spacing_sample", c.spacing_sample));
  f.push_back(integer_field("density", "blur_kernel", c.enhance.blur_kernel));
  f.push_back(number_field("density", "blur_sigma", c.enhance.blur_sigma));
  f.push_back(number_field("density", "clahe_clip", c.enhance.clahe_clip));
  f.push_back(integer_field("density", "clahe_tiles", c.enhance.clahe_tiles));

  f.push_back(integer_field("prompts", "pool", c.peaks.pool));
  f.push_back(number_field("prompts", "tau_factor", c.peaks.tau_factor));
  f.push_back(choice_field(
      "prompts", "mean_mode", [&c] { return std::string(c.peaks.mean_mode == MeanMode::kAll ? "all" : "nonzero"); },
      [&c](const std::string& raw) {
        const std::string v = trim(raw);
        if (v == "all") c.peaks.mean_mode = MeanMode::kAll;
        else if (v == "nonzero") c.peaks.mean_mode = MeanMode::kNonzero;
        else bad_value("prompts.mean_mode", v, "all or nonzero");
      }));
  f.push_back(integer_field("prompts", "min_dist_px", c.min_dist_px));

  f.push_back(choice_field(
      "segmentation", "backend", [&c] { return backend_name(c.segment.backend); },
      [&c](const std::string& v) { c.segment.backend = parse_backend(trim(v)); }));
  f.push_back(integer_field("segmentation", "wall_thresh", c.segment.wall_thresh));
  f.push_back(string_field("segmentation", "runner_command", c.segment.runner_command));
  f.push_back(choice_field(
      "segmentation", "external_dir", [&c] { return c.segment.external_dir.string(); },
      [&c](const std::string& v) { c.segment.external_dir = trim(v); }));

  auto& mf = c.mask_filter;
  f.push_back(integer_field("mask_filter", "max_holes", mf.max_holes));
  f.push_back(number_field("mask_filter", "dedup_iou", mf.dedup_iou));
  f.push_back(number_field("mask_filter", "min_scene_fraction", mf.area.min_scene_fraction));
  f.push_back(number_field("mask_filter", "min_area_m2", mf.area.min_area_m2));
  f.push_back(number_field("mask_filter", "iqr_factor", mf.area.iqr_factor));
  f.push_back(integer_field("mask_filter", "min_points", mf.area.min_points));
  f.push_back(number_field("mask_filter", "group_iou", mf.group_iou));
  f.push_back(number_field("mask_filter", "incl_thresh", mf.incl_thresh));
  f.push_back(number_field("mask_filter", "composite_cover", mf.composite_cover));
  f.push_back(number_field("mask_filter", "coverage", mf.cover.coverage));
  f.push_back(number_field("mask_filter", "iou_tol", mf.cover.iou_tol));
  f.push_back(integer_field("mask_filter", "exact_limit", mf.cover.exact_limit));

  f.push_back(number_field("contour", "rdp_epsilon", c.rdp_epsilon));
  f.push_back(number_field("contour", "merge_factor", c.merge_factor));
  f.push_back(number_field("contour", "skip_angle_deg", c.skip_angle_deg));
  f.push_back(number_field("contour", "skip_fraction", c.skip_fraction));
  f.push_back(number_field("contour", "boundary_radius", c.boundary_radius));
  f.push_back(number_field("contour", "boundary_sector_deg", c.boundary_sector_deg));
  f.push_back(number_field("contour", "fuse_tau", c.fuse_tau));
  f.push_back(number_field("contour", "fuse_band", c.fuse_band));
  f.push_back(choice_field(
      "contour", "fuse_mode", [&c] { return std::string(c.fuse_mode == CorrectionMode::kPerEdge ? "per_edge" : "per_vertex"); },
      [&c](const std::string& raw) {
        const std::string v = trim(raw);
        if (v == "per_edge") c.fuse_mode = CorrectionMode::kPerEdge;
        else if (v == "per_vertex") c.fuse_mode = CorrectionMode::kPerVertex;
        else bad_value("contour.fuse_mode", v, "per_edge or per_vertex");
      }));
  f.push_back(number_field("contour", "room_margin", c.room_margin));

  f.push_back(choice_field(
      "topology", "angle_tol_deg", [&c] { return format_double(rad_to_deg(c.adjacency.angle_tol)); },
      [&c](const std::string& v) { c.adjacency.angle_tol = deg_to_rad(parse_number<double>("topology.angle_tol_deg", v)); }));
  f.push_back(number_field("topology", "gap_tol", c.adjacency.gap_tol));
  f.push_back(number_field("topology", "min_overlap", c.adjacency.min_overlap));
  f.push_back(number_field("topology", "bin_factor", c.door_bin_factor));
  f.push_back(number_field("topology", "density_ratio", c.door_density_ratio));
  f.push_back(number_field("topology", "min_door", c.min_door));
  f.push_back(number_field("topology", "max_door", c.max_door));
  f.push_back(number_field("topology", "slab_margin", c.slab_margin));
  f.push_back(number_field("topology", "door_band_lo", c.door_band_lo));
  f.push_back(number_field("topology", "door_band_hi", c.door_band_hi));
  f.push_back(number_field("topology", "overlap_factor", c.overlap_factor));

  f.push_back(number_field("eval", "overlap_thresh", c.eval.overlap_thresh));
  f.push_back(number_field("eval", "endpoint_tol", c.eval.endpoint_tol));
  f.push_back(number_field("eval", "door_tol_bins", c.door_tol_bins));

  f.push_back(integer_field("run", "seed", c.seed));
  return f;
}

void set_value(PipelineConfig& config, const std::string& section, const std::string& key, const std::string& value) {
  for (Field& field : fields(config)) {
    if (field.section == section && field.key == key) {
      field.set(value);
      return;
    }
  }
  throw Error(ErrorCode::kConfigError, "unknown config key '" + section + "." + key + "'");
}

void validate(const PipelineConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kConfigError, what);
  };
  require(c.voxel >= 0.0, "ingest.voxel must be >= 0");
  require(c.ceiling.gamma > 0.0, "ceiling.gamma must be > 0");
  require(c.ceiling.delta_z >= 0.0, "ceiling.delta_z must be >= 0");
  require(c.ransac.dist_thresh > 0.0 && c.ransac.max_iters > 0, "ceiling.ransac_* must be positive");
  require(c.frame.kappa > 0.0 && c.frame.r_min >= 1 && c.frame.r_max >= c.frame.r_min, "density resolution settings invalid");
  require(c.enhance.blur_kernel >= 1 && c.enhance.blur_kernel % 2 == 1, "density.blur_kernel must be odd");
  require(c.peaks.pool >= 3 && c.peaks.pool % 2 == 1, "prompts.pool must be odd and >= 3");
  require(c.min_dist_px >= 0, "prompts.min_dist_px must be >= 0");
  require(c.segment.wall_thresh >= 0 && c.segment.wall_thresh <= 255, "segmentation.wall_thresh must be in [0, 255]");
  require(c.boundary_radius > 0.0, "contour.boundary_radius must be > 0");
  require(c.boundary_sector_deg > 0.0 && c.boundary_sector_deg < 360.0, "contour.boundary_sector_deg out of range");
  require(c.door_band_lo < c.door_band_hi, "topology.door_band_lo must be below door_band_hi");
  require(c.min_door <= c.max_door, "topology.min_door must not exceed max_door");
}

}  // namespace

PipelineConfig config_from_ini(const std::string& text) {
  PipelineConfig config;
  boost::property_tree::ptree tree;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorCode::kConfigError, std::string("config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw Error(ErrorCode::kConfigError, "config key '" + section + "' outside any section");
    for (const auto& [key, value] : body) set_value(config, section, key, value.data());
  }
  validate(config);
  return config;
}

void apply_overrides(PipelineConfig& config, const std::vector<std::string>& assignments) {
  for (const std::string& a : assignments) {
    const auto eq = a.find('=');
    const auto dot = a.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      throw Error(ErrorCode::kConfigError, "override '" + a + "' is not section.key=value");
    }
    set_value(config, trim(a.substr(0, dot)), trim(a.substr(dot + 1, eq - dot - 1)), a.substr(eq + 1));
  }
  validate(config);
}

std::string config_to_ini(const PipelineConfig& config) {
  PipelineConfig copy = config;
  std::string out, current;
  for (const Field& f : fields(copy)) {
    if (f.section != current) {
      if (!current.empty()) out += "\n";
      out += "[" + f.section + "]\n";
      current = f.section;
    }
    out += f.key + " = " + f.get() + "\n";
  }
  return out;
}

std::string config_section(const PipelineConfig& config, const std::string& section) {
  PipelineConfig copy = config;
  std::string out = "[" + section + "]\n";
  for (const Field& f : fields(copy)) {
    if (f.section == section) out += f.key + " = " + f.get() + "\n";
  }
  return out;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::filesystem::path chosen = path;
  if (chosen.empty()) {
    if (const char* env = std::getenv(kConfigEnvVar); env != nullptr && *env != '\0') chosen = env;
  }
  if (chosen.empty()) return PipelineConfig{};
  try {
    return config_from_ini(read_text_file(chosen));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIoFailure) throw Error(ErrorCode::kConfigError, e.what());
    throw;
  }
}

}  // namespace roomtrace
