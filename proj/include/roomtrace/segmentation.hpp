// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0
//
// Candidate room masks. Three interchangeable sources share one on-disk
// contract: a directory of masks/mask_<id>.png (0 background, 255
// foreground) plus masks/manifest.json.
//
//   external_dir       load a directory written by some earlier run
//   runner_subprocess  sam-runner --density <png> --frame <json>
//                        --prompts <json> --out <dir>
//   fallback           threshold + flood fill on the enhanced map

#ifndef ROOMTRACE_SEGMENTATION_HPP
#define ROOMTRACE_SEGMENTATION_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "roomtrace/prompts.hpp"
#include "roomtrace/raster.hpp"

namespace roomtrace {

/// Frame-aligned binary mask; pixels hold 0 or 1.
struct MaskImage {
  std::string id;
  ByteRaster pixels;
  int prompt_index{-1};
  std::optional<double> sam_score;

  [[nodiscard]] std::size_t area() const;
};

struct ManifestEntry {
  std::string id;
  std::string file;
  int prompt_index{-1};
  std::optional<double> sam_score;
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct MaskManifest {
  std::string backend;
  int width{0};
  int height{0};
  std::string frame_hash;
  std::vector<ManifestEntry> entries;
  friend bool operator==(const MaskManifest&, const MaskManifest&) = default;
};

std::string manifest_to_json(const MaskManifest& manifest);
/// Throws DecodeFailure.
MaskManifest manifest_from_json(const std::string& text);

enum class SegmentBackend { kExternalDir, kRunnerSubprocess, kFallback };

/// Parses "external_dir" | "runner_subprocess" | "fallback".
SegmentBackend parse_backend(const std::string& name);
std::string backend_name(SegmentBackend backend);

/// Flood-fills the 4-connected free region (value < wall_thresh) under each
/// prompt. Prompts on walls or in an already emitted region are skipped, so
/// the returned masks are pairwise disjoint. Ids are fb_000, fb_001, ...
std::vector<MaskImage> fallback_segment(const ByteRaster& enhanced, const PromptSet& prompts,
                                        int wall_thresh = 128);

/// Writes mask PNGs and manifest.json into dir. The manifest fingerprint is
/// the hash of frame_json_bytes.
void write_mask_dir(const std::filesystem::path& dir, const std::vector<MaskImage>& masks,
                    const std::string& backend, const std::string& frame_json_bytes);

/// Loads dir/manifest.json and its masks in manifest order. Throws
/// FrameMismatch when the fingerprint or size differs from frame_json_bytes,
/// DecodeFailure for a missing or unreadable mask.
std::vector<MaskImage> load_mask_dir(const std::filesystem::path& dir,
                                     const std::string& frame_json_bytes);

/// Runs `command --density ... --frame ... --prompts ... --out ...`, where
/// command is split on whitespace. Throws BackendUnavailable when the
/// process cannot start or exits non-zero.
void run_mask_runner(const std::string& command, const std::filesystem::path& density_png,
                     const std::filesystem::path& frame_json, const std::filesystem::path& prompts_json,
                     const std::filesystem::path& out_dir);

struct SegmentParams {
  SegmentBackend backend{SegmentBackend::kFallback};
  int wall_thresh{128};
  std::string runner_command{"sam-runner"};
  std::filesystem::path external_dir;
};

/// Inputs of one segmentation call as they sit on disk.
struct SegmentInputs {
  std::filesystem::path density_png;
  std::filesystem::path frame_json;
  std::filesystem::path prompts_json;
};

/// Dispatches to the configured backend. Runner output goes to out_dir;
/// fallback masks are computed in memory.
std::vector<MaskImage> segment(const SegmentInputs& inputs, const SegmentParams& params,
                               const std::filesystem::path& out_dir);

}  // namespace roomtrace

#endif  // ROOMTRACE_SEGMENTATION_HPP
