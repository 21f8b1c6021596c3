// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "roomtrace/segmentation.hpp"

#include <spawn.h>
#include <spdlog/spdlog.h>
#include <sys/wait.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <json.hpp>
#include <sstream>

#include "roomtrace/density.hpp"
#include "roomtrace/error.hpp"
#include "roomtrace/file_io.hpp"
#include "roomtrace/png_io.hpp"

extern char** environ;

namespace roomtrace {
namespace {

bool valid_id(const std::string& id) {
  if (id.empty() || id.size() > 128) return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return id != "." && id != "..";
}

std::string mask_file_name(const std::string& id) { return "mask_" + id + ".png"; }

}  // namespace

std::size_t MaskImage::area() const {
  std::size_t total = 0;
  for (std::uint8_t v : pixels.data()) total += v != 0 ? 1 : 0;
  return total;
}

std::string manifest_to_json(const MaskManifest& manifest) {
  nlohmann::ordered_json j;
  j["backend"] = manifest.backend;
  j["frame"] = {{"width", manifest.width}, {"height", manifest.height}, {"frame_hash", manifest.frame_hash}};
  j["entries"] = nlohmann::ordered_json::array();
  for (const ManifestEntry& e : manifest.entries) {
    nlohmann::ordered_json item;
    item["id"] = e.id;
    item["file"] = e.file;
    item["prompt_index"] = e.prompt_index;
    if (e.sam_score) item["sam_score"] = *e.sam_score;
    j["entries"].push_back(std::move(item));
  }
  return j.dump(2) + "\n";
}

MaskManifest manifest_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    MaskManifest m;
    m.backend = j.at("backend").get<std::string>();
    m.width = j.at("frame").at("width").get<int>();
    m.height = j.at("frame").at("height").get<int>();
    m.frame_hash = j.at("frame").at("frame_hash").get<std::string>();
    for (const auto& item : j.at("entries")) {
      ManifestEntry e;
      e.id = item.at("id").get<std::string>();
      e.file = item.at("file").get<std::string>();
      e.prompt_index = item.value("prompt_index", -1);
      if (item.contains("sam_score") && !item.at("sam_score").is_null()) {
        e.sam_score = item.at("sam_score").get<double>();
      }
      m.entries.push_back(std::move(e));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kDecodeFailure, std::string("manifest.json: ") + e.what());
  }
}

SegmentBackend parse_backend(const std::string& name) {
  if (name == "external_dir") return SegmentBackend::kExternalDir;
  if (name == "runner_subprocess") return SegmentBackend::kRunnerSubprocess;
  if (name == "fallback") return SegmentBackend::kFallback;
  throw Error(ErrorCode::kConfigError, "unknown segmentation backend '" + name + "'");
}

std::string backend_name(SegmentBackend backend) {
  switch (backend) {
    case SegmentBackend::kExternalDir: return "external_dir";
    case SegmentBackend::kRunnerSubprocess: return "runner_subprocess";
    case SegmentBackend::kFallback: return "fallback";
  }
  return "fallback";
}

std::vector<MaskImage> fallback_segment(const ByteRaster& enhanced, const PromptSet& prompts,
                                        int wall_thresh) {
  if (wall_thresh < 0 || wall_thresh > 255) {
    throw Error(ErrorCode::kInvalidArgument, "wall_thresh must be in [0, 255]");
  }
  const int w = enhanced.width(), h = enhanced.height();
  Raster<int> region(w, h, -1);
  std::vector<MaskImage> masks;
  std::size_t on_wall = 0;
  std::vector<std::pair<int, int>> stack;

  for (std::size_t k = 0; k < prompts.points.size(); ++k) {
    const PromptPoint& p = prompts.points[k];
    if (!enhanced.contains(p.m, p.n)) {
      spdlog::warn("prompt {} at ({}, {}) lies outside the raster; skipped", k, p.m, p.n);
      continue;
    }
    if (enhanced.at(p.m, p.n) >= wall_thresh) {
      ++on_wall;
      continue;
    }
    if (region.at(p.m, p.n) >= 0) continue;

    const int label = static_cast<int>(masks.size());
    MaskImage mask;
    char id[16];
    std::snprintf(id, sizeof id, "fb_%03d", label);
    mask.id = id;
    mask.prompt_index = static_cast<int>(k);
    mask.pixels = ByteRaster(w, h, 0);
    stack.assign(1, {p.m, p.n});
    region.at(p.m, p.n) = label;
    while (!stack.empty()) {
      const auto [m, n] = stack.back();
      stack.pop_back();
      mask.pixels.at(m, n) = 1;
      constexpr int kDm[4] = {1, -1, 0, 0};
      constexpr int kDn[4] = {0, 0, 1, -1};
      for (int d = 0; d < 4; ++d) {
        const int mm = m + kDm[d], nn = n + kDn[d];
        if (!enhanced.contains(mm, nn) || region.at(mm, nn) >= 0) continue;
        if (enhanced.at(mm, nn) >= wall_thresh) continue;
        region.at(mm, nn) = label;
        stack.emplace_back(mm, nn);
      }
    }
    masks.push_back(std::move(mask));
  }
  if (on_wall > 0) spdlog::info("{} prompt(s) on wall pixels skipped", on_wall);
  return masks;
}

void write_mask_dir(const std::filesystem::path& dir, const std::vector<MaskImage>& masks,
                    const std::string& backend, const std::string& frame_json_bytes) {
  const ProjectionFrame frame = frame_from_json(frame_json_bytes);
  std::filesystem::create_directories(dir);
  MaskManifest manifest;
  manifest.backend = backend;
  manifest.width = frame.width;
  manifest.height = frame.height;
  manifest.frame_hash = frame_fingerprint(frame_json_bytes);
  for (const MaskImage& mask : masks) {
    if (!valid_id(mask.id)) throw Error(ErrorCode::kInvalidArgument, "invalid mask id '" + mask.id + "'");
    if (mask.pixels.width() != frame.width || mask.pixels.height() != frame.height) {
      throw Error(ErrorCode::kDimensionMismatch, "mask " + mask.id + " does not match the frame");
    }
    ByteRaster out(mask.pixels.width(), mask.pixels.height());
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = mask.pixels.data()[i] ? 255 : 0;
    const std::string file = mask_file_name(mask.id);
    write_png_gray(out, dir / file);
    manifest.entries.push_back({mask.id, file, mask.prompt_index, mask.sam_score});
  }
  write_text_file(dir / "manifest.json", manifest_to_json(manifest));
}

std::vector<MaskImage> load_mask_dir(const std::filesystem::path& dir,
                                     const std::string& frame_json_bytes) {
  const ProjectionFrame frame = frame_from_json(frame_json_bytes);
  const std::filesystem::path manifest_path = dir / "manifest.json";
  if (!std::filesystem::exists(manifest_path)) {
    throw Error(ErrorCode::kBackendUnavailable, "no manifest.json in " + dir.string());
  }
  const MaskManifest manifest = manifest_from_json(read_text_file(manifest_path));
  if (manifest.width != frame.width || manifest.height != frame.height ||
      manifest.frame_hash != frame_fingerprint(frame_json_bytes)) {
    throw Error(ErrorCode::kFrameMismatch,
                "mask manifest was produced for a different frame (" + manifest.frame_hash + ")");
  }
  std::vector<MaskImage> masks;
  for (const ManifestEntry& e : manifest.entries) {
    if (!valid_id(e.id)) throw Error(ErrorCode::kDecodeFailure, "invalid mask id '" + e.id + "'");
    const std::filesystem::path file = dir / e.file;
    if (!std::filesystem::exists(file)) {
      throw Error(ErrorCode::kDecodeFailure, "mask file missing: " + file.string());
    }
    ByteRaster raw = read_png_gray(file);
    if (raw.width() != frame.width || raw.height() != frame.height) {
      throw Error(ErrorCode::kFrameMismatch, "mask " + e.id + " size differs from the frame");
    }
    MaskImage mask;
    mask.id = e.id;
    mask.prompt_index = e.prompt_index;
    mask.sam_score = e.sam_score;
    mask.pixels = ByteRaster(raw.width(), raw.height());
    for (std::size_t i = 0; i < raw.size(); ++i) mask.pixels.data()[i] = raw.data()[i] >= 128 ? 1 : 0;
    if (mask.area() == 0) {
      spdlog::warn("mask {} has no foreground pixels; skipped", e.id);
      continue;
    }
    masks.push_back(std::move(mask));
  }
  return masks;
}

void run_mask_runner(const std::string& command, const std::filesystem::path& density_png,
                     const std::filesystem::path& frame_json, const std::filesystem::path& prompts_json,
                     const std::filesystem::path& out_dir) {
  std::vector<std::string> args;
  std::istringstream split(command);
  for (std::string tok; split >> tok;) args.push_back(tok);
  if (args.empty()) throw Error(ErrorCode::kBackendUnavailable, "mask runner command is empty");
  for (const auto& [flag, value] : {std::pair{"--density", density_png}, std::pair{"--frame", frame_json},
                                     std::pair{"--prompts", prompts_json}, std::pair{"--out", out_dir}}) {
    args.emplace_back(flag);
    args.push_back(value.string());
  }
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  std::filesystem::create_directories(out_dir);
  pid_t pid = 0;
  const int rc = posix_spawnp(&pid, argv[0], nullptr, nullptr, argv.data(), environ);
  if (rc != 0) {
    throw Error(ErrorCode::kBackendUnavailable,
                "cannot start mask runner '" + args[0] + "': " + std::strerror(rc));
  }
  int status = 0;
  while (waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw Error(ErrorCode::kBackendUnavailable, "waitpid failed for mask runner");
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    throw Error(ErrorCode::kBackendUnavailable, "mask runner exited with status " + std::to_string(code));
  }
}

std::vector<MaskImage> segment(const SegmentInputs& inputs, const SegmentParams& params,
                               const std::filesystem::path& out_dir) {
  const std::string frame_bytes = read_text_file(inputs.frame_json);
  switch (params.backend) {
    case SegmentBackend::kExternalDir:
      return load_mask_dir(params.external_dir, frame_bytes);
    case SegmentBackend::kRunnerSubprocess:
      run_mask_runner(params.runner_command, inputs.density_png, inputs.frame_json, inputs.prompts_json,
                      out_dir);
      return load_mask_dir(out_dir, frame_bytes);
    case SegmentBackend::kFallback: {
      const DensityGrid grid = import_density_png(inputs.density_png, inputs.frame_json);
      const PromptSet prompts = prompts_from_json(read_text_file(inputs.prompts_json));
      return fallback_segment(*grid.enhanced, prompts, params.wall_thresh);
    }
  }
  throw Error(ErrorCode::kBackendUnavailable, "unknown backend");
}

}  // namespace roomtrace
