// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures.

#include <spdlog/spdlog.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "roomtrace/config.hpp"
#include "roomtrace/density.hpp"
#include "roomtrace/eval.hpp"
#include "roomtrace/file_io.hpp"
#include "roomtrace/hash.hpp"
#include "roomtrace/pipeline.hpp"
#include "roomtrace/synthetic.hpp"
#include "support.hpp"

namespace rt = roomtrace;
namespace t = roomtrace::testing;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s  [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void ceiling_filter_vs_oracle() {
  int equal = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    t::Rng rng(1000 + seed);
    const auto n = static_cast<std::size_t>(t::uniform_int(rng, 1, 5000));
    const rt::PointCloud pc = t::random_room_cloud(rng, n);
    const auto t0 = Clock::now();
    const auto got = rt::ceiling_filter_indices(pc, {0.1, 0.1, rt::CeilingMaxMode::kPerCell});
    worst = std::max(worst, seconds_since(t0));
    if (got == t::oracle_ceiling_indices(pc, 0.1, 0.1)) ++equal;
  }
  report(1, "ceiling filter equals brute-force per-cell filter", equal == 20 && worst < 1.0,
         std::to_string(equal) + "/20 equal, slowest run " + std::to_string(worst) + " s (limit 1 s)");
}

void density_conservation() {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    t::Rng rng(2000 + seed);
    const rt::PointCloud pc = t::random_room_cloud(rng, static_cast<std::size_t>(t::uniform_int(rng, 100, 5000)));
    const rt::PointCloud filtered = rt::grid_ceiling_filter(pc);
    if (filtered.size() < 2) continue;
    const rt::ProjectionFrame f = rt::compute_frame(filtered.bounds(), rt::estimate_point_spacing(filtered));
    const rt::DensityGrid g = rt::project_density(filtered, f);
    const auto& c = g.counts.data();
    if (std::accumulate(c.begin(), c.end(), std::uint64_t{0}) == filtered.size()) ++ok;
  }
  report(2, "density counts sum to filtered point count", ok == 20, std::to_string(ok) + "/20 clouds");
}

void prompt_invariants() {
  int score_ok = 0, spacing_ok = 0, peaks_ok = 0;
  const int runs = 30;
  for (int seed = 0; seed < runs; ++seed) {
    t::Rng rng(3000 + static_cast<std::uint64_t>(seed));
    const rt::ByteRaster img = t::random_raster(rng, 64, 64);
    const rt::PeakParams params{11, 0.9, rt::MeanMode::kAll};
    const double mean = std::accumulate(img.data().begin(), img.data().end(), 0.0) / static_cast<double>(img.size());
    const rt::PromptSet s = rt::extract_prompts(img, params, 10);
    bool scores = true, spacing = true;
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      scores = scores && s.points[i].score >= 0.9 * mean;
      for (std::size_t j = i + 1; j < s.points.size(); ++j) {
        spacing = spacing && std::hypot(s.points[i].m - s.points[j].m, s.points[i].n - s.points[j].n) >= 10.0;
      }
    }
    score_ok += scores;
    spacing_ok += spacing;
    peaks_ok += rt::detect_peaks(img, params) == t::oracle_peaks(img, 11, 0.9 * mean);
  }
  report(3, "prompts: score >= 0.9 mean, spacing >= 10 px, peaks equal oracle",
         score_ok == runs && spacing_ok == runs && peaks_ok == runs,
         "score " + std::to_string(score_ok) + "/" + std::to_string(runs) + ", spacing " + std::to_string(spacing_ok) +
             "/" + std::to_string(runs) + ", peaks " + std::to_string(peaks_ok) + "/" + std::to_string(runs) +
             " (64x64 rasters)");
}

void mask_filter_vs_oracles() {
  const int runs = 60;
  int dedup_ok = 0, group_ok = 0, incl_ok = 0, gate_ok = 0, cover_ok = 0, attainable = 0;
  for (int seed = 0; seed < runs; ++seed) {
    t::Rng rng(4000 + static_cast<std::uint64_t>(seed));
    const auto masks = t::random_mask_instance(rng, 32, 10);
    std::vector<rt::MaskStats> stats;
    for (const auto& m : masks) stats.push_back(t::stats_for(m, static_cast<std::size_t>(t::uniform_int(rng, 0, 3))));
    std::vector<std::size_t> all(masks.size());
    std::iota(all.begin(), all.end(), 0);
    const rt::OverlapTable table(masks);
    dedup_ok += rt::dedup(table, stats, all, 0.8) == t::oracle_dedup(masks, stats, all, 0.8);
    group_ok += rt::group_masks(table, stats, all, 0.5) == t::oracle_groups(masks, stats, all, 0.5);
    incl_ok += rt::inclusion_prune(table, stats, all, 0.9, 2.0) == t::oracle_inclusion(masks, stats, all, 0.9, 2.0);
    const rt::CoverResult r = rt::greedy_cover(table, all, {0.95, 0.01, 20});
    bool gate = true;
    for (std::size_t a = 0; a < r.selected.size(); ++a) {
      for (std::size_t b = a + 1; b < r.selected.size(); ++b) {
        gate = gate && t::oracle_iou(masks[r.selected[a]].pixels, masks[r.selected[b]].pixels) <= 0.01;
      }
    }
    gate_ok += gate;
    const double best = t::oracle_best_coverage(masks, all, 0.01);
    if (best >= 0.95) {
      ++attainable;
      cover_ok += r.coverage >= 0.95 && !r.below_target;
    } else {
      cover_ok += r.below_target;
    }
  }
  const auto frac = [&](int k) { return std::to_string(k) + "/" + std::to_string(runs); };
  report(4, "mask filter: dedup, grouping, inclusion, greedy cover",
         dedup_ok == runs && group_ok == runs && incl_ok == runs && gate_ok == runs && cover_ok == runs,
         "dedup " + frac(dedup_ok) + ", groups " + frac(group_ok) + ", inclusion " + frac(incl_ok) + ", IoU gate " +
             frac(gate_ok) + ", coverage rule " + frac(cover_ok) + " (" + std::to_string(attainable) +
             " with 0.95 attainable)");
}

void rectilinear_rooms() {
  int ok = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const t::RoomTrial trial = t::regularize_perturbed_room(5000 + seed);
    const double dev = t::max_axis_deviation(trial.fused.polygon, trial.theta);
    worst = std::max(worst, dev);
    ok += trial.regularized.regularized && dev <= 1e-6;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", worst);
  report(5, "regularize + fuse_correct edges at theta or theta + 90 deg", ok == 50,
         std::to_string(ok) + "/50 rooms, worst deviation " + buf + " rad (limit 1e-6)");
}

void boundary_flags_vs_oracle() {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    t::Rng rng(6000 + seed);
    const int n = t::uniform_int(rng, 2, 1000);
    std::vector<rt::Vec2> pts;
    for (int i = 0; i < n; ++i) pts.push_back({t::uniform(rng, 0, 3), t::uniform(rng, 0, 2)});
    ok += rt::boundary_flags(pts, 0.2, rt::deg_to_rad(30.0)) == t::oracle_boundary_flags(pts, 0.2, rt::deg_to_rad(30.0));
  }
  report(6, "boundary flags equal the O(N^2) oracle", ok == 20, std::to_string(ok) + "/20 clouds of <= 1000 points");
}

void metric_arithmetic() {
  const rt::PrecisionRecall first = rt::boundary_precision_recall(92, 100, 100);
  bool ok = first.precision == 0.92 && first.recall == 92.0 / 100.0;
  constexpr std::array<int, 12> p100{92, 92, 82, 94, 90, 90, 93, 95, 88, 84, 90, 95};
  constexpr std::array<int, 12> r100{90, 94, 89, 98, 94, 96, 96, 97, 92, 92, 94, 98};
  constexpr std::array<double, 12> precision{.92, .92, .82, .94, .90, .90, .93, .95, .88, .84, .90, .95};
  constexpr std::array<double, 12> recall{.90, .94, .89, .98, .94, .96, .96, .97, .92, .92, .94, .98};
  int exact = 0;
  for (std::size_t k = 0; k < 12; ++k) {
    const auto pr = rt::boundary_precision_recall(static_cast<std::size_t>(p100[k] * r100[k]),
                                                  static_cast<std::size_t>(100 * r100[k]),
                                                  static_cast<std::size_t>(100 * p100[k]));
    exact += pr.precision == precision[k] && pr.recall == recall[k];
  }
  ok = ok && exact == 12;
  report(7, "metric arithmetic", ok,
         "(92,100,100) -> P " + std::to_string(first.precision) + " R " + std::to_string(first.recall) + "; " +
             std::to_string(exact) + "/12 GibLayout columns exact");
}

rt::PipelineConfig synthetic_config() {
  return rt::load_config(std::string(ROOMTRACE_SOURCE_DIR) + "/configs/synthetic.ini");
}

void synthetic_end_to_end(const t::TempDir& dir) {
  const rt::SyntheticScene scene = rt::builtin_scene("four_room");
  const rt::SyntheticResult synth = rt::generate_synthetic(scene);
  rt::write_ply_binary(synth.cloud, dir / "cloud.ply");
  rt::write_text_file(dir / "gt.json", rt::ground_truth_to_json(synth.truth));
  double area = 0.0;
  for (const auto& ring : synth.truth.rooms) area += std::abs(rt::signed_area(ring));

  const rt::PipelineConfig config = synthetic_config();
  const auto t0 = Clock::now();
  const rt::PipelineResult r = rt::run_pipeline(config, dir / "cloud.ply", {dir / "e2e", dir / "gt.json", false});
  const double secs = seconds_since(t0);
  const rt::EvalReport& e = *r.eval;
  const double bin = config.door_bin_factor * r.plan.frame.pixel_size;
  const bool ok = e.room_true == 4 && e.room_gt == 4 && e.boundaries.precision >= 0.90 &&
                  e.boundaries.recall >= 0.90 && e.doors.door_true == 3 && e.doors.door_gt == 3 && secs < 60.0;
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "%zu pts, %.1f m^2, sigma %.2f, fallback; rooms %zu/%zu, boundary P %.3f R %.3f at %.2f m, "
                "doors %zu/%zu within %.0f bins (%.3f m), %.2f s",
                synth.cloud.size(), area, scene.noise_sigma, e.room_true, e.room_gt, e.boundaries.precision,
                e.boundaries.recall, config.eval.endpoint_tol, e.doors.door_true, e.doors.door_gt,
                config.door_tol_bins, config.door_tol_bins * bin, secs);
  report(8, "synthetic four-room end to end", ok, buf);
}

void bit_identical_reruns(const t::TempDir& dir) {
  const rt::PipelineConfig config = synthetic_config();
  rt::run_pipeline(config, dir / "cloud.ply", {dir / "run_a", std::nullopt, false});
  rt::run_pipeline(config, dir / "cloud.ply", {dir / "run_b", std::nullopt, false});
  const std::string a = rt::read_text_file(dir / "run_a" / rt::files::kFloorplan);
  const std::string b = rt::read_text_file(dir / "run_b" / rt::files::kFloorplan);
  report(9, "floorplan.json bit-identical across reruns", a == b && !a.empty(),
         std::to_string(a.size()) + " bytes, FNV " + rt::to_hex(rt::fnv1a64(a)) + " vs " + rt::to_hex(rt::fnv1a64(b)));
}

template <typename F>
void guarded(int id, const char* name, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  guarded(1, "ceiling filter", ceiling_filter_vs_oracle);
  guarded(2, "density conservation", density_conservation);
  guarded(3, "prompts", prompt_invariants);
  guarded(4, "mask filter", mask_filter_vs_oracles);
  guarded(5, "rectilinear rooms", rectilinear_rooms);
  guarded(6, "boundary flags", boundary_flags_vs_oracle);
  guarded(7, "metrics", metric_arithmetic);
  t::TempDir dir("acceptance");
  guarded(8, "synthetic end to end", [&] { synthetic_end_to_end(dir); });
  guarded(9, "bit-identical reruns", [&] { bit_identical_reruns(dir); });
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
