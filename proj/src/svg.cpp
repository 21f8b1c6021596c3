// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "roomtrace/svg.hpp"

#include <cmath>
#include <cstdio>

namespace roomtrace {
namespace {

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const FloorPlan& plan, const SvgParams& params) {
  const ProjectionFrame& f = plan.frame;
  const double w_mm = f.pixel_size * f.width * 1000.0;
  const double h_mm = f.pixel_size * f.height * 1000.0;
  const double y_top = f.y_min + f.pixel_size * f.height;
  auto sx = [&](double x) { return num((x - f.x_min) * 1000.0 + params.margin_mm); };
  auto sy = [&](double y) { return num((y_top - y) * 1000.0 + params.margin_mm); };
  const double total_w = w_mm + 2.0 * params.margin_mm, total_h = h_mm + 2.0 * params.margin_mm;

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(total_w) + "mm\" height=\"" + num(total_h) +
         "mm\" viewBox=\"0 0 " + num(total_w) + " " + num(total_h) + "\">\n";
  if (params.grid && f.pixel_size > 0.0) {
    out += "  <g id=\"grid\" stroke=\"#cccccc\" stroke-width=\"5\">\n";
    for (double x = std::ceil(f.x_min); x <= f.x_min + w_mm / 1000.0; x += 1.0) {
      out += "    <line x1=\"" + sx(x) + "\" y1=\"" + sy(f.y_min) + "\" x2=\"" + sx(x) + "\" y2=\"" + sy(y_top) + "\"/>\n";
    }
    for (double y = std::ceil(f.y_min); y <= y_top; y += 1.0) {
      out += "    <line x1=\"" + sx(f.x_min) + "\" y1=\"" + sy(y) + "\" x2=\"" + sx(f.x_min + w_mm / 1000.0) + "\" y2=\"" +
             sy(y) + "\"/>\n";
    }
    out += "  </g>\n";
  }
  if (!plan.rooms.empty()) {
    out += "  <g id=\"rooms\" fill=\"none\" stroke=\"#000000\" stroke-width=\"30\">\n";
    for (const RoomContour& r : plan.rooms) {
      if (r.polygon.empty()) continue;
      std::string d;
      for (std::size_t k = 0; k < r.polygon.size(); ++k) {
        d += (k == 0 ? "M " : " L ") + sx(r.polygon[k].x) + " " + sy(r.polygon[k].y);
      }
      d += " Z";
      out += "    <path id=\"" + escape(r.id) + "\" d=\"" + d + "\"/>\n";
    }
    out += "  </g>\n";
  }
  if (!plan.doors.empty()) {
    out += "  <g id=\"doors\" stroke=\"" + escape(params.door_color) + "\" stroke-width=\"60\">\n";
    for (const DoorSegment& door : plan.doors) {
      out += "    <line id=\"" + escape(door.id) + "\" x1=\"" + sx(door.p0.x) + "\" y1=\"" + sy(door.p0.y) + "\" x2=\"" +
             sx(door.p1.x) + "\" y2=\"" + sy(door.p1.y) + "\"/>\n";
    }
    out += "  </g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace roomtrace
