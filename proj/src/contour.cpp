// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "roomtrace/contour.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "roomtrace/error.hpp"
#include "roomtrace/mask_filter.hpp"
#include "roomtrace/spatial_index.hpp"

namespace roomtrace {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

constexpr std::size_t kMinDirectionCandidates = 4;

double fold_quarter(double angle) {
  double f = std::fmod(angle, kHalfPi);
  if (f < 0.0) f += kHalfPi;
  if (f >= kHalfPi) f -= kHalfPi;
  return f;
}

double axis_distance(double angle) {
  const double f = fold_quarter(angle);
  return std::min(f, kHalfPi - f);
}

struct Line {
  int cls{0};
  double offset{0.0};
  double weight{0.0};
  Vec2 start;
  Vec2 end;
};

Line combine(const Line& a, const Line& b) {
  Line out = a;
  const double w = a.weight + b.weight;
  out.offset = w > 0.0 ? (a.offset * a.weight + b.offset * b.weight) / w : 0.5 * (a.offset + b.offset);
  out.weight = w;
  out.end = b.end;
  return out;
}

RectilinearRing to_ring(double theta, const std::vector<Line>& lines) {
  RectilinearRing ring;
  ring.theta = theta;
  for (const Line& l : lines) {
    ring.cls.push_back(l.cls);
    ring.offset.push_back(l.offset);
  }
  return ring;
}

// Signed length of each line's edge along its own direction.
std::vector<double> signed_lengths(const RectilinearRing& ring) {
  const auto v = ring.vertices();
  const std::size_t n = ring.size();
  std::vector<double> len(n);
  for (std::size_t k = 0; k < n; ++k) len[k] = ring.direction(ring.cls[k]).dot(v[(k + 1) % n] - v[k]);
  return len;
}

// Mode-seeded median: the densest bin of width `bin`, then the median of
// the values within one bin of its centre.
double robust_offset(std::vector<double> values, double bin) {
  std::sort(values.begin(), values.end());
  std::size_t best_count = 0;
  double best_centre = values.front();
  for (std::size_t i = 0, j = 0; i < values.size(); ++i) {
    while (values[j] < values[i] - bin) ++j;
    const std::size_t count = i - j + 1;
    if (count > best_count) {
      best_count = count;
      best_centre = 0.5 * (values[i] + values[j]);
    }
  }
  std::vector<double> near;
  for (double v : values) {
    if (std::abs(v - best_centre) <= bin) near.push_back(v);
  }
  const std::size_t mid = near.size() / 2;
  return near.size() % 2 == 1 ? near[mid] : 0.5 * (near[mid - 1] + near[mid]);
}

}  // namespace

std::vector<bool> boundary_flags(std::span<const Vec2> points, double radius, double sector_rad) {
  std::vector<bool> flags(points.size(), true);
  if (points.empty()) return flags;
  const GridIndex2 index(points, radius);
  std::vector<double> azimuths;
  for (std::size_t i = 0; i < points.size(); ++i) {
    azimuths.clear();
    const Vec2& p = points[i];
    index.for_each_within(p, radius, [&](std::size_t j) {
      if (j == i) return;
      const Vec2 d = points[j] - p;
      if (d.x == 0.0 && d.y == 0.0) return;
      azimuths.push_back(std::atan2(d.y, d.x));
    });
    if (azimuths.empty()) continue;
    std::sort(azimuths.begin(), azimuths.end());
    double gap = azimuths.front() + 2.0 * std::numbers::pi - azimuths.back();
    for (std::size_t k = 1; k < azimuths.size(); ++k) gap = std::max(gap, azimuths[k] - azimuths[k - 1]);
    flags[i] = gap >= sector_rad;
  }
  return flags;
}

BoundaryPointSet extract_boundary_points(std::span<const Vec2> points, double radius, double sector_rad) {
  if (points.size() < 2) throw Error(ErrorCode::kTooFewPoints, "boundary extraction needs >= 2 points");
  if (!(radius > 0.0) || !(sector_rad > 0.0) || !(sector_rad < 2.0 * std::numbers::pi)) {
    throw Error(ErrorCode::kInvalidArgument, "boundary radius must be > 0 and sector in (0, 360) degrees");
  }
  BoundaryPointSet out;
  out.radius = radius;
  out.sector_rad = sector_rad;
  const auto flags = boundary_flags(points, radius, sector_rad);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (flags[i]) out.points.push_back(points[i]);
  }
  return out;
}

std::vector<Vec2> trace_mask_contour(const ByteRaster& mask) {
  const int components = count_components(mask);
  if (components != 1) {
    throw Error(ErrorCode::kMultipleComponents,
                "mask has " + std::to_string(components) + " foreground components, expected 1");
  }
  int sm = -1, sn = -1;
  for (int n = 0; n < mask.height() && sm < 0; ++n) {
    for (int m = 0; m < mask.width(); ++m) {
      if (mask.at(m, n)) {
        sm = m;
        sn = n;
        break;
      }
    }
  }
  // Clockwise on screen (row index grows downwards), starting west.
  constexpr int kDm[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
  constexpr int kDn[8] = {0, -1, -1, -1, 0, 1, 1, 1};
  auto fg = [&](int m, int n) { return mask.contains(m, n) && mask.at(m, n) != 0; };
  auto dir_of = [&](int dm, int dn) {
    for (int d = 0; d < 8; ++d) {
      if (kDm[d] == dm && kDn[d] == dn) return d;
    }
    return 0;
  };

  std::vector<Vec2> contour{{static_cast<double>(sm), static_cast<double>(sn)}};
  int cm = sm, cn = sn;
  int back = 0;  // direction from current pixel to its backtrack pixel
  int first_m = -1, first_n = -1;
  const std::size_t guard = 4 * mask.size() + 8;
  for (std::size_t step = 0; step < guard; ++step) {
    int next = -1;
    for (int k = 1; k <= 8; ++k) {
      const int d = (back + k) % 8;
      if (fg(cm + kDm[d], cn + kDn[d])) {
        next = d;
        break;
      }
    }
    if (next < 0) break;  // isolated pixel
    const int nm = cm + kDm[next], nn = cn + kDn[next];
    if (first_m < 0) {
      first_m = nm;
      first_n = nn;
    } else if (cm == sm && cn == sn && nm == first_m && nn == first_n) {
      break;
    }
    // The pixel examined just before `next` is background; it becomes the
    // backtrack of the new current pixel.
    const int prev = (next + 7) % 8;
    const int bm = cm + kDm[prev], bn = cn + kDn[prev];
    cm = nm;
    cn = nn;
    back = dir_of(bm - cm, bn - cn);
    if (cm == sm && cn == sn) continue;
    contour.push_back({static_cast<double>(cm), static_cast<double>(cn)});
  }
  return contour;
}

std::vector<Vec2> pixels_to_world(std::span<const Vec2> pixels, const ProjectionFrame& frame) {
  std::vector<Vec2> out;
  out.reserve(pixels.size());
  for (const Vec2& p : pixels) out.push_back(frame.pixel_center(p.x, p.y));
  return out;
}

std::vector<Vec2> rdp_open(std::span<const Vec2> chain, double epsilon) {
  if (chain.size() <= 2) return {chain.begin(), chain.end()};
  std::vector<bool> keep(chain.size(), false);
  keep.front() = keep.back() = true;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, chain.size() - 1}};
  while (!stack.empty()) {
    const auto [a, b] = stack.back();
    stack.pop_back();
    double worst = -1.0;
    std::size_t at = a;
    for (std::size_t i = a + 1; i < b; ++i) {
      const double d = point_segment_distance(chain[i], chain[a], chain[b]);
      if (d > worst) {
        worst = d;
        at = i;
      }
    }
    if (at != a && worst > epsilon) {
      keep[at] = true;
      stack.emplace_back(a, at);
      stack.emplace_back(at, b);
    }
  }
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (keep[i]) out.push_back(chain[i]);
  }
  return out;
}

std::vector<Vec2> rdp_simplify(std::span<const Vec2> ring, double epsilon) {
  if (epsilon < 0.0) throw Error(ErrorCode::kInvalidArgument, "RDP epsilon must be >= 0");
  const std::size_t n = ring.size();
  if (n <= 3) return {ring.begin(), ring.end()};
  std::size_t bi = 0, bj = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = distance(ring[i], ring[j]);
      if (d > best) {
        best = d;
        bi = i;
        bj = j;
      }
    }
  }
  std::vector<Vec2> first(ring.begin() + static_cast<std::ptrdiff_t>(bi),
                          ring.begin() + static_cast<std::ptrdiff_t>(bj) + 1);
  std::vector<Vec2> second(ring.begin() + static_cast<std::ptrdiff_t>(bj), ring.end());
  second.insert(second.end(), ring.begin(), ring.begin() + static_cast<std::ptrdiff_t>(bi) + 1);
  auto a = rdp_open(first, epsilon);
  auto b = rdp_open(second, epsilon);
  a.pop_back();
  b.pop_back();
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

double main_direction(std::span<const Vec2> ring) {
  const auto edges = ring_edges(ring);
  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (edges[k].length() > 0.0) order.push_back(k);
  }
  if (order.empty()) throw Error(ErrorCode::kDegenerateGeometry, "contour has no edge of positive length");
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return edges[a].length() > edges[b].length(); });
  // At least four candidates, so a quadrilateral is not decided by its longest edge alone.
  const auto top = std::min(order.size(), std::max<std::size_t>(
      kMinDirectionCandidates, static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(order.size())))));
  std::size_t best = order.front();
  double best_dist = axis_distance(line_angle(edges[best].b - edges[best].a));
  for (std::size_t r = 1; r < top; ++r) {
    const std::size_t k = order[r];
    const double d = axis_distance(line_angle(edges[k].b - edges[k].a));
    if (d < best_dist) {
      best = k;
      best_dist = d;
    }
  }
  return fold_quarter(line_angle(edges[best].b - edges[best].a));
}

Vec2 RectilinearRing::direction(int c) const {
  const double a = c == 0 ? theta : theta + kHalfPi;
  return {std::cos(a), std::sin(a)};
}

Vec2 RectilinearRing::normal(int c) const { return direction(c).perp(); }

std::vector<Vec2> RectilinearRing::vertices() const {
  const std::size_t n = size();
  std::vector<Vec2> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t p = (k + n - 1) % n;
    v[k] = normal(cls[p]) * offset[p] + normal(cls[k]) * offset[k];
  }
  return v;
}

RegularizeResult regularize(std::span<const Vec2> ring, double theta, const RegularizeParams& params) {
  if (!(theta >= 0.0 && theta < kHalfPi)) {
    throw Error(ErrorCode::kInvalidArgument, "main direction must lie in [0, pi/2)");
  }
  RegularizeResult result;
  result.ring.theta = theta;

  double total = 0.0, deviating = 0.0;
  for (const Segment2& e : ring_edges(ring)) {
    const double a = line_angle(e.b - e.a);
    const double dev = std::min(line_angle_difference(a, theta), line_angle_difference(a, theta + kHalfPi));
    total += e.length();
    if (dev > params.skip_angle) deviating += e.length();
  }
  if (total > 0.0 && deviating > params.skip_fraction * total) {
    spdlog::info("room left unregularized: {:.0f}% of its outline is off-axis", 100.0 * deviating / total);
    result.polygon.assign(ring.begin(), ring.end());
    result.regularized = false;
    return result;
  }

  RectilinearRing basis;
  basis.theta = theta;
  std::vector<Line> lines;
  for (const Segment2& e : ring_edges(ring)) {
    if (!(e.length() > 0.0)) continue;
    const int cls = line_angle_difference(line_angle(e.b - e.a), theta) < std::numbers::pi / 4.0 ? 0 : 1;
    const Vec2 mid = (e.a + e.b) * 0.5;
    lines.push_back({cls, basis.normal(cls).dot(mid), e.length(), e.a, e.b});
  }

  auto degenerate = [&] {
    return Error(ErrorCode::kDegenerateAfterMerge,
                 "only " + std::to_string(lines.size()) + " lines left after merging");
  };

  // Merge consecutive near-collinear lines of the same class.
  for (bool changed = true; changed && lines.size() > 1;) {
    changed = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const std::size_t j = (i + 1) % lines.size();
      if (i == j || lines[i].cls != lines[j].cls) continue;
      if (std::abs(lines[i].offset - lines[j].offset) >= params.merge_tol) continue;
      lines[i] = combine(lines[i], lines[j]);
      lines.erase(lines.begin() + static_cast<std::ptrdiff_t>(j));
      changed = true;
      break;
    }
  }
  if (lines.size() < 2) throw degenerate();

  // Separate parallel neighbours with a connector through their junction.
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t j = (i + 1) % lines.size();
    if (lines[i].cls != lines[j].cls) continue;
    const Vec2 junction = (lines[i].end + lines[j].start) * 0.5;
    const int cls = 1 - lines[i].cls;
    lines.insert(lines.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                 Line{cls, basis.normal(cls).dot(junction), 0.0, junction, junction});
    ++i;
  }

  // Drop edges shorter than merge_tol and fuse the two lines they separated.
  for (;;) {
    if (lines.size() < 4) throw degenerate();
    const auto len = signed_lengths(to_ring(theta, lines));
    std::size_t shortest = 0;
    for (std::size_t k = 1; k < len.size(); ++k) {
      if (std::abs(len[k]) < std::abs(len[shortest])) shortest = k;
    }
    if (std::abs(len[shortest]) >= params.merge_tol) break;
    const std::size_t n = lines.size();
    const std::size_t p = (shortest + n - 1) % n, q = (shortest + 1) % n;
    Line merged = combine(lines[p], lines[q]);
    merged.weight = lines[p].weight + lines[q].weight + lines[shortest].weight;
    lines[p] = merged;
    // Erase the higher index first so the lower one stays valid.
    const std::size_t hi = std::max(shortest, q), lo = std::min(shortest, q);
    lines.erase(lines.begin() + static_cast<std::ptrdiff_t>(hi));
    lines.erase(lines.begin() + static_cast<std::ptrdiff_t>(lo));
  }

  result.ring = to_ring(theta, lines);
  result.polygon = result.ring.vertices();
  return result;
}

FuseResult fuse_correct(const RectilinearRing& ring, const BoundaryPointSet& boundary, const FuseParams& params) {
  FuseResult out;
  out.ring = ring;
  out.edge_shift.assign(ring.size(), 0.0);
  const auto before = ring.vertices();
  out.polygon = before;
  if (boundary.points.empty() || ring.size() < 4 || !std::isfinite(params.tau)) return out;

  const GridIndex2 index(boundary.points, std::max(params.band, 0.05));
  const std::size_t n = ring.size();
  std::vector<double> loss(n);
  std::vector<Vec2> nearest(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto hit = index.nearest(before[k]);
    loss[k] = hit->distance;
    nearest[k] = boundary.points[hit->index];
  }

  RectilinearRing moved = ring;
  if (params.mode == CorrectionMode::kPerEdge) {
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t k1 = (k + 1) % n;
      if (!(loss[k] > params.tau && loss[k1] > params.tau)) {
        spdlog::debug("fuse: edge {} kept, vertex loss {:.3f} {:.3f}", k, loss[k], loss[k1]);
        continue;
      }
      const Vec2 d = ring.direction(ring.cls[k]);
      const Vec2 nu = ring.normal(ring.cls[k]);
      double lo = d.dot(before[k]), hi = d.dot(before[k1]);
      if (lo > hi) std::swap(lo, hi);
      const double trim = std::min(params.band, 0.25 * (hi - lo));
      lo += trim;
      hi -= trim;
      std::vector<double> offsets;
      const Vec2 centre = (before[k] + before[k1]) * 0.5;
      const double reach = 0.5 * (hi - lo) + params.band + 1e-9;
      index.for_each_within(centre, std::hypot(reach, params.band), [&](std::size_t i) {
        const Vec2& p = boundary.points[i];
        const double t = d.dot(p);
        const double o = nu.dot(p) - ring.offset[k];
        if (t >= lo && t <= hi && std::abs(o) <= params.band) offsets.push_back(o);
      });
      if (offsets.size() < 3) {
        spdlog::debug("fuse: edge {} kept, {} boundary points in band", k, offsets.size());
        continue;
      }
      const std::size_t support = offsets.size();
      moved.offset[k] = ring.offset[k] + robust_offset(std::move(offsets), params.tau);
      spdlog::debug("fuse: edge {} shifted {:.3f} from {} points", k, moved.offset[k] - ring.offset[k], support);
    }
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      if (!(loss[k] > params.tau)) continue;
      const std::size_t p = (k + n - 1) % n;
      moved.offset[p] = ring.normal(ring.cls[p]).dot(nearest[k]);
      moved.offset[k] = ring.normal(ring.cls[k]).dot(nearest[k]);
    }
  }

  // Undo any translation that reverses or collapses an edge.
  const auto base_len = signed_lengths(ring);
  for (std::size_t pass = 0; pass <= n; ++pass) {
    const auto len = signed_lengths(moved);
    bool reverted = false;
    for (std::size_t k = 0; k < n; ++k) {
      const bool flipped = len[k] * base_len[k] <= 0.0;
      if (!flipped) continue;
      for (std::size_t line : {(k + n - 1) % n, k, (k + 1) % n}) {
        if (moved.offset[line] != ring.offset[line]) {
          moved.offset[line] = ring.offset[line];
          reverted = true;
        }
      }
    }
    if (!reverted) break;
  }

  out.ring = moved;
  out.polygon = moved.vertices();
  for (std::size_t k = 0; k < n; ++k) {
    out.edge_shift[k] = moved.offset[k] - ring.offset[k];
    if (!(out.polygon[k] == before[k])) ++out.snapped_vertices;
  }
  return out;
}

RoomContour extract_room_contour(const MaskImage& mask, const ProjectionFrame& frame,
                                 const BoundaryPointSet& boundary, double spacing,
                                 const ContourParams& params, ContourTrace* trace) {
  RoomContour room;
  room.id = mask.id;
  const auto raw = pixels_to_world(trace_mask_contour(mask.pixels), frame);
  if (raw.size() < 3) {
    throw Error(ErrorCode::kDegenerateGeometry, "mask " + mask.id + " traces to fewer than 3 vertices");
  }
  const double eps = params.rdp_epsilon > 0.0 ? params.rdp_epsilon : dynamic_epsilon(frame.pixel_size, spacing);
  const auto simplified = rdp_simplify(raw, eps);
  if (simplified.size() < 3) {
    throw Error(ErrorCode::kDegenerateGeometry, "mask " + mask.id + " simplifies to fewer than 3 vertices");
  }
  room.theta_main = main_direction(simplified);
  const RegularizeResult reg = regularize(simplified, room.theta_main, params.regularize);
  room.regularized = reg.regularized;
  room.polygon = reg.polygon;
  if (reg.regularized && !boundary.points.empty()) {
    const FuseResult fused = fuse_correct(reg.ring, boundary, params.fuse);
    room.polygon = fused.polygon;
    room.snapped_vertices = fused.snapped_vertices;
  }
  if (trace != nullptr) {
    trace->raw = raw;
    trace->simplified = simplified;
    trace->regularized = reg.polygon;
    trace->final_polygon = room.polygon;
  }
  return room;
}

}  // namespace roomtrace
