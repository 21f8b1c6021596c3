// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0
//
// Prompt points for the segmenter: local maxima of the enhanced density map
// above a mean-relative threshold, thinned by a minimum pixel spacing.

#ifndef ROOMTRACE_PROMPTS_HPP
#define ROOMTRACE_PROMPTS_HPP

#include <string>
#include <vector>

#include "roomtrace/raster.hpp"

namespace roomtrace {

struct PromptPoint {
  int m{0};
  int n{0};
  double score{0.0};
  friend bool operator==(const PromptPoint&, const PromptPoint&) = default;
};

struct PromptSet {
  std::vector<PromptPoint> points;
  double tau{0.0};
  int min_dist_px{0};
  friend bool operator==(const PromptSet&, const PromptSet&) = default;
};

/// Pixels counted in the mean behind tau.
enum class MeanMode { kAll, kNonzero };

struct PeakParams {
  int pool{11};
  double tau_factor{0.9};
  MeanMode mean_mode{MeanMode::kAll};
};

/// tau_factor * mean(image) over all pixels or only the non-zero ones.
double prompt_threshold(const ByteRaster& image, double tau_factor, MeanMode mode);

/// Pixels equal to the maximum of their pool x pool window (clipped at the
/// border) with value >= tau, in row-major order. Throws EmptyRaster.
std::vector<PromptPoint> detect_peaks(const ByteRaster& image, const PeakParams& params = {});

/// Greedy thinning by score descending, then (m, n) ascending: a candidate
/// survives iff it is at least min_dist_px from every earlier survivor.
PromptSet enforce_min_distance(std::vector<PromptPoint> candidates, int min_dist_px, double tau);

/// detect_peaks followed by enforce_min_distance.
PromptSet extract_prompts(const ByteRaster& image, const PeakParams& params = {},
                          int min_dist_px = 10);

/// {"tau", "min_dist_px", "points": [{"m", "n", "score"}]}
std::string prompts_to_json(const PromptSet& prompts);
PromptSet prompts_from_json(const std::string& text);

}  // namespace roomtrace

#endif  // ROOMTRACE_PROMPTS_HPP
