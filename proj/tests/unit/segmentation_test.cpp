// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "roomtrace/segmentation.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include "roomtrace/density.hpp"
#include "roomtrace/error.hpp"
#include "roomtrace/file_io.hpp"
#include "roomtrace/png_io.hpp"
#include "support.hpp"

namespace roomtrace {
namespace {

using testing::Rng;
using testing::thrown_code;
namespace fs = std::filesystem;

const std::string kFakeRunner = std::string("python3 ") + ROOMTRACE_FIXTURES_DIR + "/fake_sam_runner.py";

// 20 x 12 map: bright walls around two 8 x 8 free areas split by a wall at m = 10.
ByteRaster two_cells() {
  ByteRaster img(20, 12, 200);
  for (int n = 2; n < 10; ++n) {
    for (int m = 1; m < 9; ++m) img.at(m, n) = 30;
    for (int m = 11; m < 19; ++m) img.at(m, n) = 30;
  }
  return img;
}

TEST(Fallback, SealedRectangleGivesItsInterior) {
  PromptSet prompts;
  prompts.points = {{4, 5, 30}};
  const auto masks = fallback_segment(two_cells(), prompts, 90);
  ASSERT_EQ(masks.size(), 1u);
  EXPECT_EQ(masks[0].id, "fb_000");
  EXPECT_EQ(masks[0].area(), 64u);
  EXPECT_EQ(masks[0].prompt_index, 0);
  EXPECT_EQ(masks[0].pixels.at(1, 2), 1);
  EXPECT_EQ(masks[0].pixels.at(11, 2), 0);
}

TEST(Fallback, WallPromptsAndRepeatsSkipped) {
  PromptSet prompts;
  prompts.points = {{4, 5, 30}, {5, 6, 30}, {10, 5, 200}, {15, 5, 30}};
  const auto masks = fallback_segment(two_cells(), prompts, 90);
  ASSERT_EQ(masks.size(), 2u);
  EXPECT_EQ(masks[1].id, "fb_001");
  EXPECT_EQ(masks[1].prompt_index, 3);
}

TEST(FallbackProperty, MasksArePairwiseDisjointAndFree) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const ByteRaster img = testing::random_raster(rng, 48, 40);
    PromptSet prompts;
    for (int k = 0; k < 12; ++k) {
      prompts.points.push_back({testing::uniform_int(rng, 0, 47), testing::uniform_int(rng, 0, 39), 0});
    }
    const auto masks = fallback_segment(img, prompts, 40);
    ByteRaster seen(48, 40, 0);
    for (const MaskImage& mask : masks) {
      for (int n = 0; n < 40; ++n) {
        for (int m = 0; m < 48; ++m) {
          if (!mask.pixels.at(m, n)) continue;
          EXPECT_LT(img.at(m, n), 40);
          EXPECT_EQ(seen.at(m, n), 0) << "seed " << seed;
          seen.at(m, n) = 1;
        }
      }
    }
  }
}

struct Fixture {
  testing::TempDir dir{"seg"};
  std::string frame_bytes;
  SegmentInputs inputs;

  Fixture() {
    DensityGrid g;
    g.frame = {0.0, 0.0, 0.1, 20, 12};
    g.enhanced = two_cells();
    inputs = {dir / "density.png", dir / "frame.json", dir / "prompts.json"};
    export_density_png(g, inputs.density_png, inputs.frame_json);
    frame_bytes = read_text_file(inputs.frame_json);
    PromptSet prompts;
    prompts.points = {{4, 5, 30}, {15, 5, 30}};
    write_text_file(inputs.prompts_json, prompts_to_json(prompts));
  }
};

TEST(MaskDir, RoundTripKeepsOrderAndScores) {
  Fixture f;
  auto masks = fallback_segment(two_cells(), prompts_from_json(read_text_file(f.inputs.prompts_json)), 90);
  masks[0].sam_score = 0.75;
  write_mask_dir(f.dir / "masks", masks, "fallback", f.frame_bytes);
  EXPECT_TRUE(fs::exists(f.dir / "masks" / "mask_fb_000.png"));
  const auto back = load_mask_dir(f.dir / "masks", f.frame_bytes);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].id, masks[i].id);
    EXPECT_EQ(back[i].pixels, masks[i].pixels);
    EXPECT_EQ(back[i].prompt_index, masks[i].prompt_index);
    EXPECT_EQ(back[i].sam_score, masks[i].sam_score);
  }
}

TEST(MaskDir, PngIsZeroOr255) {
  Fixture f;
  const auto masks = fallback_segment(two_cells(), prompts_from_json(read_text_file(f.inputs.prompts_json)), 90);
  write_mask_dir(f.dir / "masks", masks, "fallback", f.frame_bytes);
  const ByteRaster png = read_png_gray(f.dir / "masks" / "mask_fb_001.png");
  for (std::size_t i = 0; i < png.size(); ++i) {
    EXPECT_TRUE(png.data()[i] == 0 || png.data()[i] == 255);
    EXPECT_EQ(png.data()[i] == 255, masks[1].pixels.data()[i] == 1);
  }
}

TEST(MaskDir, OtherFrameIsMismatch) {
  Fixture f;
  const auto masks = fallback_segment(two_cells(), prompts_from_json(read_text_file(f.inputs.prompts_json)), 90);
  write_mask_dir(f.dir / "masks", masks, "fallback", f.frame_bytes);
  const std::string other = frame_to_json({0.0, 0.0, 0.2, 20, 12});
  EXPECT_EQ(thrown_code([&] { load_mask_dir(f.dir / "masks", other); }), ErrorCode::kFrameMismatch);
}

TEST(MaskDir, MissingManifestAndMissingFile) {
  Fixture f;
  EXPECT_EQ(thrown_code([&] { load_mask_dir(f.dir / "nothing", f.frame_bytes); }), ErrorCode::kBackendUnavailable);
  const auto masks = fallback_segment(two_cells(), prompts_from_json(read_text_file(f.inputs.prompts_json)), 90);
  write_mask_dir(f.dir / "masks", masks, "fallback", f.frame_bytes);
  fs::remove(f.dir / "masks" / "mask_fb_000.png");
  EXPECT_EQ(thrown_code([&] { load_mask_dir(f.dir / "masks", f.frame_bytes); }), ErrorCode::kDecodeFailure);
}

TEST(MaskDir, InvalidIdRejected) {
  Fixture f;
  MaskImage bad;
  bad.id = "../x";
  bad.pixels = ByteRaster(20, 12, 1);
  EXPECT_EQ(thrown_code([&] { write_mask_dir(f.dir / "m", {bad}, "fallback", f.frame_bytes); }),
            ErrorCode::kInvalidArgument);
}

TEST(Manifest, JsonRoundTrip) {
  MaskManifest m{"sam", 4, 3, "00ff", {{"a", "mask_a.png", 0, 0.5}, {"b", "mask_b.png", 2, std::nullopt}}};
  EXPECT_EQ(manifest_from_json(manifest_to_json(m)), m);
  EXPECT_EQ(thrown_code([] { manifest_from_json("{\"backend\": 1}"); }), ErrorCode::kDecodeFailure);
}

TEST(Backend, Names) {
  for (auto b : {SegmentBackend::kExternalDir, SegmentBackend::kRunnerSubprocess, SegmentBackend::kFallback}) {
    EXPECT_EQ(parse_backend(backend_name(b)), b);
  }
  EXPECT_EQ(thrown_code([] { parse_backend("sam"); }), ErrorCode::kConfigError);
}

TEST(Segment, ExternalDirLoadsManifestOrder) {
  Fixture f;
  const auto masks = fallback_segment(two_cells(), prompts_from_json(read_text_file(f.inputs.prompts_json)), 90);
  write_mask_dir(f.dir / "ext", masks, "fallback", f.frame_bytes);
  SegmentParams p;
  p.backend = SegmentBackend::kExternalDir;
  p.external_dir = f.dir / "ext";
  const auto out = segment(f.inputs, p, f.dir / "out");
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].id, "fb_000");
}

TEST(Segment, FallbackBackendReadsTheFiles) {
  Fixture f;
  SegmentParams p;
  p.wall_thresh = 90;
  const auto out = segment(f.inputs, p, f.dir / "out");
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[1].area(), 64u);
}

TEST(Segment, RunnerSubprocessFileContract) {
  Fixture f;
  SegmentParams p;
  p.backend = SegmentBackend::kRunnerSubprocess;
  p.runner_command = kFakeRunner + " --half 2";
  const auto out = segment(f.inputs, p, f.dir / "runner");
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].id, "sam_000");
  EXPECT_EQ(out[0].area(), 25u);
  EXPECT_EQ(out[0].pixels.at(4, 5), 1);
  EXPECT_EQ(out[1].pixels.at(15, 5), 1);
  ASSERT_TRUE(out[1].sam_score);
  EXPECT_DOUBLE_EQ(*out[1].sam_score, 0.51);
  EXPECT_TRUE(fs::exists(f.dir / "runner" / "manifest.json"));
}

TEST(Segment, RunnerFailureIsBackendUnavailable) {
  Fixture f;
  SegmentParams p;
  p.backend = SegmentBackend::kRunnerSubprocess;
  p.runner_command = kFakeRunner + " --mode fail";
  EXPECT_EQ(thrown_code([&] { segment(f.inputs, p, f.dir / "runner"); }), ErrorCode::kBackendUnavailable);
  p.runner_command = "roomtrace-no-such-runner";
  EXPECT_EQ(thrown_code([&] { segment(f.inputs, p, f.dir / "runner2"); }), ErrorCode::kBackendUnavailable);
}

TEST(Segment, RunnerWithWrongFingerprintIsMismatch) {
  Fixture f;
  SegmentParams p;
  p.backend = SegmentBackend::kRunnerSubprocess;
  p.runner_command = kFakeRunner + " --mode bad-hash";
  EXPECT_EQ(thrown_code([&] { segment(f.inputs, p, f.dir / "runner"); }), ErrorCode::kFrameMismatch);
}

}  // namespace
}  // namespace roomtrace
