// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "roomtrace/prompts.hpp"

#include <algorithm>
#include <json.hpp>
#include <unordered_map>

#include "roomtrace/error.hpp"

namespace roomtrace {

double prompt_threshold(const ByteRaster& image, double tau_factor, MeanMode mode) {
  double total = 0.0;
  std::size_t count = 0;
  for (std::uint8_t v : image.data()) {
    if (mode == MeanMode::kNonzero && v == 0) continue;
    total += v;
    ++count;
  }
  return count == 0 ? 0.0 : tau_factor * total / static_cast<double>(count);
}

std::vector<PromptPoint> detect_peaks(const ByteRaster& image, const PeakParams& params) {
  if (image.empty()) throw Error(ErrorCode::kEmptyRaster, "peak detection on an empty raster");
  if (params.pool < 3 || params.pool % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "pool must be odd and >= 3");
  }
  const int w = image.width(), h = image.height(), half = params.pool / 2;
  const double tau = prompt_threshold(image, params.tau_factor, params.mean_mode);

  // Separable max filter: horizontal pass, then vertical.
  ByteRaster row_max(w, h), pooled(w, h);
  for (int n = 0; n < h; ++n) {
    for (int m = 0; m < w; ++m) {
      std::uint8_t best = 0;
      for (int t = std::max(0, m - half); t <= std::min(w - 1, m + half); ++t) {
        best = std::max(best, image.at(t, n));
      }
      row_max.at(m, n) = best;
    }
  }
  for (int n = 0; n < h; ++n) {
    for (int m = 0; m < w; ++m) {
      std::uint8_t best = 0;
      for (int t = std::max(0, n - half); t <= std::min(h - 1, n + half); ++t) {
        best = std::max(best, row_max.at(m, t));
      }
      pooled.at(m, n) = best;
    }
  }

  std::vector<PromptPoint> peaks;
  for (int n = 0; n < h; ++n) {
    for (int m = 0; m < w; ++m) {
      const std::uint8_t v = image.at(m, n);
      if (v == pooled.at(m, n) && static_cast<double>(v) >= tau) {
        peaks.push_back({m, n, static_cast<double>(v)});
      }
    }
  }
  return peaks;
}

PromptSet enforce_min_distance(std::vector<PromptPoint> candidates, int min_dist_px, double tau) {
  if (min_dist_px < 0) throw Error(ErrorCode::kInvalidArgument, "min_dist_px must be >= 0");
  std::stable_sort(candidates.begin(), candidates.end(), [](const PromptPoint& a, const PromptPoint& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.m != b.m) return a.m < b.m;
    return a.n < b.n;
  });

  PromptSet out;
  out.tau = tau;
  out.min_dist_px = min_dist_px;
  if (min_dist_px == 0) {
    out.points = std::move(candidates);
    return out;
  }

  // Kept points bucketed in min_dist-sized cells; a blocker is always within
  // one cell of the candidate's cell.
  const long cell = min_dist_px;
  const long d2 = static_cast<long>(min_dist_px) * min_dist_px;
  std::unordered_map<long long, std::vector<std::size_t>> buckets;
  auto key = [](long cx, long cy) { return (static_cast<long long>(cx) << 32) ^ (cy & 0xffffffffLL); };
  for (const PromptPoint& c : candidates) {
    const long cx = c.m / cell, cy = c.n / cell;
    bool blocked = false;
    for (long dy = -1; dy <= 1 && !blocked; ++dy) {
      for (long dx = -1; dx <= 1 && !blocked; ++dx) {
        auto it = buckets.find(key(cx + dx, cy + dy));
        if (it == buckets.end()) continue;
        for (std::size_t k : it->second) {
          const long ex = out.points[k].m - c.m, ey = out.points[k].n - c.n;
          if (ex * ex + ey * ey < d2) {
            blocked = true;
            break;
          }
        }
      }
    }
    if (blocked) continue;
    buckets[key(cx, cy)].push_back(out.points.size());
    out.points.push_back(c);
  }
  return out;
}

PromptSet extract_prompts(const ByteRaster& image, const PeakParams& params, int min_dist_px) {
  const double tau = prompt_threshold(image, params.tau_factor, params.mean_mode);
  return enforce_min_distance(detect_peaks(image, params), min_dist_px, tau);
}

std::string prompts_to_json(const PromptSet& prompts) {
  nlohmann::ordered_json j;
  j["tau"] = prompts.tau;
  j["min_dist_px"] = prompts.min_dist_px;
  j["points"] = nlohmann::ordered_json::array();
  for (const PromptPoint& p : prompts.points) {
    nlohmann::ordered_json e;
    e["m"] = p.m;
    e["n"] = p.n;
    e["score"] = p.score;
    j["points"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

PromptSet prompts_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    PromptSet out;
    out.tau = j.at("tau").get<double>();
    out.min_dist_px = j.at("min_dist_px").get<int>();
    for (const auto& e : j.at("points")) {
      out.points.push_back({e.at("m").get<int>(), e.at("n").get<int>(), e.at("score").get<double>()});
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kDecodeFailure, std::string("prompts.json: ") + e.what());
  }
}

}  // namespace roomtrace
