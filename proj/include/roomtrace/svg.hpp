// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ROOMTRACE_SVG_HPP
#define ROOMTRACE_SVG_HPP

#include <string>

#include "roomtrace/topology.hpp"

namespace roomtrace {

struct SvgParams {
  bool grid{false};           ///< 1 m grid lines
  double margin_mm{200.0};
  std::string door_color{"#d62728"};
};

/// Coordinates in millimetres, y pointing up in world space and down in the
/// document. Rooms are closed black paths with one id attribute each; doors
/// are coloured line elements. Numbers carry three decimals.
std::string render_svg(const FloorPlan& plan, const SvgParams& params = {});

}  // namespace roomtrace

#endif  // ROOMTRACE_SVG_HPP
