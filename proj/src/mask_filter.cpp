// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "roomtrace/mask_filter.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <numeric>

#include "roomtrace/error.hpp"

namespace roomtrace {
namespace {

struct Box {
  int m0{0}, n0{0}, m1{-1}, n1{-1};  // inclusive
};

Box bounding_box(const ByteRaster& r) {
  Box b{r.width(), r.height(), -1, -1};
  for (int n = 0; n < r.height(); ++n) {
    for (int m = 0; m < r.width(); ++m) {
      if (!r.at(m, n)) continue;
      b.m0 = std::min(b.m0, m);
      b.n0 = std::min(b.n0, n);
      b.m1 = std::max(b.m1, m);
      b.n1 = std::max(b.n1, n);
    }
  }
  return b;
}

// Labels connected pixels whose value (as bool) equals `value`.
// Returns the number of components; touches_border[k] says whether
// component k reaches the raster edge.
int label_components(const ByteRaster& r, bool value, bool eight, std::vector<bool>* touches_border) {
  const int w = r.width(), h = r.height();
  Raster<int> label(w, h, -1);
  std::vector<std::pair<int, int>> stack;
  int count = 0;
  for (int n = 0; n < h; ++n) {
    for (int m = 0; m < w; ++m) {
      if ((r.at(m, n) != 0) != value || label.at(m, n) >= 0) continue;
      bool border = false;
      label.at(m, n) = count;
      stack.assign(1, {m, n});
      while (!stack.empty()) {
        const auto [cm, cn] = stack.back();
        stack.pop_back();
        if (cm == 0 || cn == 0 || cm == w - 1 || cn == h - 1) border = true;
        for (int dn = -1; dn <= 1; ++dn) {
          for (int dm = -1; dm <= 1; ++dm) {
            if (dm == 0 && dn == 0) continue;
            if (!eight && dm != 0 && dn != 0) continue;
            const int mm = cm + dm, nn = cn + dn;
            if (!r.contains(mm, nn) || label.at(mm, nn) >= 0) continue;
            if ((r.at(mm, nn) != 0) != value) continue;
            label.at(mm, nn) = count;
            stack.emplace_back(mm, nn);
          }
        }
      }
      if (touches_border) touches_border->push_back(border);
      ++count;
    }
  }
  return count;
}

// Union-find over candidate positions.
struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Components of the thresholded IoU graph as lists of candidate positions,
// ordered by their first position.
std::vector<std::vector<std::size_t>> iou_components(const OverlapTable& table,
                                                     std::span<const std::size_t> candidates,
                                                     double thresh) {
  DisjointSets sets(candidates.size());
  for (std::size_t a = 0; a < candidates.size(); ++a) {
    for (std::size_t b = a + 1; b < candidates.size(); ++b) {
      if (table.iou(candidates[a], candidates[b]) >= thresh) sets.unite(a, b);
    }
  }
  std::vector<std::vector<std::size_t>> comps;
  std::vector<std::size_t> slot(candidates.size(), std::numeric_limits<std::size_t>::max());
  for (std::size_t a = 0; a < candidates.size(); ++a) {
    const std::size_t root = sets.find(a);
    if (slot[root] == std::numeric_limits<std::size_t>::max()) {
      slot[root] = comps.size();
      comps.emplace_back();
    }
    comps[slot[root]].push_back(a);
  }
  return comps;
}

std::size_t best_of(std::span<const MaskStats> stats, std::span<const std::size_t> candidates,
                    const std::vector<std::size_t>& positions) {
  std::size_t best = candidates[positions.front()];
  for (std::size_t p : positions) {
    if (ranks_above(stats[candidates[p]], stats[best])) best = candidates[p];
  }
  return best;
}

std::vector<std::size_t> by_rank(std::span<const MaskStats> stats, std::span<const std::size_t> candidates) {
  std::vector<std::size_t> order(candidates.begin(), candidates.end());
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ranks_above(stats[a], stats[b]); });
  return order;
}

std::vector<std::size_t> keep_in_input_order(std::span<const std::size_t> candidates,
                                             const std::vector<bool>& keep_by_index) {
  std::vector<std::size_t> out;
  for (std::size_t c : candidates) {
    if (keep_by_index[c]) out.push_back(c);
  }
  return out;
}

}  // namespace

int count_components(const ByteRaster& mask) { return label_components(mask, true, false, nullptr); }

int count_holes(const ByteRaster& mask) {
  std::vector<bool> border;
  label_components(mask, false, true, &border);
  return static_cast<int>(std::count(border.begin(), border.end(), false));
}

MaskStats compute_stats(const MaskImage& mask, double pixel_size, const CountRaster& counts) {
  MaskStats s;
  s.id = mask.id;
  s.area_px = mask.area();
  s.area_m2 = static_cast<double>(s.area_px) * pixel_size * pixel_size;
  s.component_count = count_components(mask.pixels);
  s.hole_count = count_holes(mask.pixels);
  if (!counts.empty()) {
    if (!counts.same_shape(mask.pixels)) {
      throw Error(ErrorCode::kDimensionMismatch, "mask " + mask.id + " differs from the density raster");
    }
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (mask.pixels.data()[i]) s.point_count += counts.data()[i];
    }
  }
  return s;
}

double iou(const MaskImage& a, const MaskImage& b) {
  if (!a.pixels.same_shape(b.pixels)) {
    throw Error(ErrorCode::kDimensionMismatch, "IoU of masks with different sizes");
  }
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const bool x = a.pixels.data()[i] != 0, y = b.pixels.data()[i] != 0;
    inter += (x && y) ? 1 : 0;
    uni += (x || y) ? 1 : 0;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

OverlapTable::OverlapTable(std::span<const MaskImage> masks) : masks_(masks) {
  const std::size_t n = masks.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (!masks[i].pixels.same_shape(masks[0].pixels)) {
      throw Error(ErrorCode::kDimensionMismatch, "mask " + masks[i].id + " differs in size");
    }
  }
  areas_.resize(n);
  inter_.assign(n * n, 0);
  std::vector<Box> boxes(n);
  for (std::size_t i = 0; i < n; ++i) {
    areas_[i] = masks[i].area();
    boxes[i] = bounding_box(masks[i].pixels);
    inter_[i * n + i] = areas_[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const int m0 = std::max(boxes[i].m0, boxes[j].m0), m1 = std::min(boxes[i].m1, boxes[j].m1);
      const int n0 = std::max(boxes[i].n0, boxes[j].n0), n1 = std::min(boxes[i].n1, boxes[j].n1);
      std::size_t count = 0;
      for (int y = n0; y <= n1; ++y) {
        for (int x = m0; x <= m1; ++x) {
          count += (masks[i].pixels.at(x, y) && masks[j].pixels.at(x, y)) ? 1 : 0;
        }
      }
      inter_[i * n + j] = inter_[j * n + i] = count;
    }
  }
}

double OverlapTable::iou(std::size_t i, std::size_t j) const {
  const std::size_t inter = intersection(i, j);
  const std::size_t uni = areas_[i] + areas_[j] - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double OverlapTable::containment(std::size_t i, std::size_t j) const {
  return areas_[j] == 0 ? 0.0 : static_cast<double>(intersection(i, j)) / static_cast<double>(areas_[j]);
}

std::size_t OverlapTable::union_area(std::span<const std::size_t> members) const {
  if (members.empty()) return 0;
  const auto& first = masks_[members.front()].pixels;
  std::size_t total = 0;
  for (std::size_t p = 0; p < first.size(); ++p) {
    for (std::size_t i : members) {
      if (masks_[i].pixels.data()[p]) {
        ++total;
        break;
      }
    }
  }
  return total;
}

bool ranks_above(const MaskStats& a, const MaskStats& b) {
  if (a.area_px != b.area_px) return a.area_px > b.area_px;
  if (a.point_count != b.point_count) return a.point_count > b.point_count;
  return a.id > b.id;
}

bool connectivity_screen(const MaskStats& stats, int max_holes) {
  return stats.component_count == 1 && stats.hole_count <= max_holes;
}

std::vector<std::size_t> dedup(const OverlapTable& table, std::span<const MaskStats> stats,
                               std::span<const std::size_t> candidates, double iou_thresh) {
  std::vector<bool> keep(table.size(), false);
  for (const auto& comp : iou_components(table, candidates, iou_thresh)) {
    keep[best_of(stats, candidates, comp)] = true;
  }
  return keep_in_input_order(candidates, keep);
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "quantile of an empty list");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double area_upper_bound(std::vector<double> areas, double iqr_factor) {
  if (areas.empty()) return std::numeric_limits<double>::infinity();
  const double q25 = quantile(areas, 0.25);
  const double q75 = quantile(std::move(areas), 0.75);
  return q75 + iqr_factor * (q75 - q25);
}

std::size_t scaled_min_points(std::size_t base, double pixel_size) {
  const double scale = (0.05 / pixel_size) * (0.05 / pixel_size);
  return static_cast<std::size_t>(std::llround(static_cast<double>(base) * scale));
}

AreaScreenResult area_point_screen(std::span<const MaskStats> stats, std::span<const std::size_t> candidates,
                                   double scene_area_m2, const AreaScreenParams& params,
                                   std::size_t min_points) {
  if (!(scene_area_m2 > 0.0)) throw Error(ErrorCode::kInvalidArgument, "scene area must be positive");
  AreaScreenResult out;
  out.lower_bound = std::max(params.min_scene_fraction * scene_area_m2, params.min_area_m2);
  std::vector<double> passing;
  for (std::size_t c : candidates) {
    if (stats[c].area_m2 >= out.lower_bound) passing.push_back(stats[c].area_m2);
  }
  out.upper_bound = area_upper_bound(std::move(passing), params.iqr_factor);
  for (std::size_t c : candidates) {
    const MaskStats& s = stats[c];
    if (s.area_m2 >= out.lower_bound && s.area_m2 <= out.upper_bound && s.point_count >= min_points) {
      out.kept.push_back(c);
    }
  }
  return out;
}

std::vector<MaskGroup> group_masks(const OverlapTable& table, std::span<const MaskStats> stats,
                                   std::span<const std::size_t> candidates, double iou_thresh) {
  std::vector<MaskGroup> groups;
  for (const auto& comp : iou_components(table, candidates, iou_thresh)) {
    MaskGroup g;
    for (std::size_t p : comp) g.members.push_back(candidates[p]);
    g.representative = best_of(stats, candidates, comp);
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<std::size_t> remove_composites(const OverlapTable& table, std::span<const MaskStats> stats,
                                           std::span<const std::size_t> candidates, double incl_thresh,
                                           double part_cover, double disjoint_iou) {
  std::vector<bool> keep(table.size(), false);
  for (std::size_t c : candidates) keep[c] = true;
  for (std::size_t c : candidates) {
    std::vector<std::size_t> parts;
    for (std::size_t o : candidates) {
      if (o != c && table.area(o) < table.area(c) && table.containment(c, o) >= incl_thresh) parts.push_back(o);
    }
    if (parts.size() < 2) continue;
    std::vector<std::size_t> chosen;
    std::size_t covered = 0;
    for (std::size_t o : by_rank(stats, parts)) {
      const bool disjoint = std::all_of(chosen.begin(), chosen.end(),
                                        [&](std::size_t s) { return table.iou(s, o) <= disjoint_iou; });
      if (!disjoint) continue;
      chosen.push_back(o);
      covered += table.intersection(c, o);
    }
    if (chosen.size() >= 2 &&
        static_cast<double>(covered) >= part_cover * static_cast<double>(table.area(c))) {
      keep[c] = false;
    }
  }
  return keep_in_input_order(candidates, keep);
}

std::vector<std::size_t> inclusion_prune(const OverlapTable& table, std::span<const MaskStats> stats,
                                         std::span<const std::size_t> candidates, double incl_thresh,
                                         double iqr_factor) {
  std::vector<std::size_t> kept;
  for (std::size_t c : by_rank(stats, candidates)) {
    const bool included = std::any_of(kept.begin(), kept.end(),
                                      [&](std::size_t k) { return table.containment(k, c) >= incl_thresh; });
    if (!included) kept.push_back(c);
  }
  std::vector<double> areas;
  for (std::size_t k : kept) areas.push_back(stats[k].area_m2);
  const double upper = area_upper_bound(std::move(areas), iqr_factor);
  std::vector<bool> keep(table.size(), false);
  for (std::size_t k : kept) keep[k] = stats[k].area_m2 <= upper;
  return keep_in_input_order(candidates, keep);
}

CoverResult greedy_cover(const OverlapTable& table, std::span<const std::size_t> candidates,
                         const CoverParams& params) {
  if (candidates.empty()) throw Error(ErrorCode::kNoCandidates, "no mask candidates left to select");
  std::vector<std::size_t> order(candidates.begin(), candidates.end());
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return table.area(a) > table.area(b); });
  const double total = static_cast<double>(table.union_area(candidates));
  auto compatible = [&](std::size_t a, std::size_t b) { return table.iou(a, b) <= params.iou_tol; };

  CoverResult out;
  std::size_t sum = 0;
  for (std::size_t c : order) {
    if (std::all_of(out.selected.begin(), out.selected.end(), [&](std::size_t s) { return compatible(s, c); })) {
      out.selected.push_back(c);
      sum += table.area(c);
    }
  }
  out.coverage = total > 0.0 ? static_cast<double>(sum) / total : 0.0;

  if (out.coverage < params.coverage && order.size() <= params.exact_limit) {
    // Exact search: most masks among feasible subsets reaching the target,
    // then highest coverage; first found wins remaining ties.
    std::vector<std::size_t> current, best;
    std::size_t best_sum = 0;
    const auto target = static_cast<std::size_t>(std::ceil(params.coverage * total - 1e-9));
    std::vector<std::size_t> suffix(order.size() + 1, 0);
    for (std::size_t i = order.size(); i-- > 0;) suffix[i] = suffix[i + 1] + table.area(order[i]);
    bool found = false;
    auto search = [&](auto&& self, std::size_t i, std::size_t acc) -> void {
      if (acc + suffix[i] < target) return;
      if (i == order.size()) {
        if (!found || current.size() > best.size() || (current.size() == best.size() && acc > best_sum)) {
          found = true;
          best = current;
          best_sum = acc;
        }
        return;
      }
      const std::size_t c = order[i];
      if (std::all_of(current.begin(), current.end(), [&](std::size_t s) { return compatible(s, c); })) {
        current.push_back(c);
        self(self, i + 1, acc + table.area(c));
        current.pop_back();
      }
      self(self, i + 1, acc);
    };
    search(search, 0, 0);
    if (found) {
      out.selected = best;
      out.coverage = static_cast<double>(best_sum) / total;
      out.exact = true;
    }
  }
  out.below_target = out.coverage < params.coverage;
  return out;
}

FilterReport filter_masks(std::span<const MaskImage> masks, const CountRaster& counts, double pixel_size,
                          double scene_area_m2, const MaskFilterParams& params) {
  FilterReport report;
  report.scene_area_m2 = scene_area_m2;
  for (const MaskImage& m : masks) report.stats.push_back(compute_stats(m, pixel_size, counts));
  report.decisions.assign(masks.size(), {"selected", ""});
  if (masks.empty()) throw Error(ErrorCode::kNoCandidates, "segmentation produced no masks");
  const OverlapTable table(masks);
  const auto& stats = report.stats;

  auto eliminate = [&](std::span<const std::size_t> before, std::span<const std::size_t> after,
                       const std::string& stage, const auto& why) {
    std::vector<bool> survived(masks.size(), false);
    for (std::size_t a : after) survived[a] = true;
    for (std::size_t b : before) {
      if (!survived[b]) report.decisions[b] = {stage, why(b)};
    }
  };

  std::vector<std::size_t> all(masks.size());
  std::iota(all.begin(), all.end(), 0);

  std::vector<std::size_t> connected;
  for (std::size_t i : all) {
    if (connectivity_screen(stats[i], params.max_holes)) connected.push_back(i);
  }
  eliminate(all, connected, "connectivity", [&](std::size_t i) {
    return std::to_string(stats[i].component_count) + " components, " + std::to_string(stats[i].hole_count) +
           " holes";
  });

  const auto unique = dedup(table, stats, connected, params.dedup_iou);
  eliminate(connected, unique, "dedup", [&](std::size_t) { return "IoU >= dedup threshold with a better mask"; });

  const std::size_t min_points = scaled_min_points(params.area.min_points, pixel_size);
  const auto screened = area_point_screen(stats, unique, scene_area_m2, params.area, min_points);
  report.area_lower_bound = screened.lower_bound;
  report.area_upper_bound = screened.upper_bound;
  eliminate(unique, screened.kept, "area_point", [&](std::size_t i) {
    if (stats[i].area_m2 < screened.lower_bound) return std::string("area below lower bound");
    if (stats[i].area_m2 > screened.upper_bound) return std::string("area above Q75 + k*IQR");
    return "point count " + std::to_string(stats[i].point_count) + " < " + std::to_string(min_points);
  });

  const auto simple = remove_composites(table, stats, screened.kept, params.incl_thresh, params.composite_cover,
                                        params.cover.iou_tol);
  eliminate(screened.kept, simple, "composite", [&](std::size_t) { return "union of disjoint sub-room masks"; });

  report.groups = group_masks(table, stats, simple, params.group_iou);

  const auto pruned = inclusion_prune(table, stats, simple, params.incl_thresh, params.area.iqr_factor);
  eliminate(simple, pruned, "inclusion", [&](std::size_t) { return "contained in a kept mask or oversized"; });

  if (pruned.empty()) throw Error(ErrorCode::kNoCandidates, "every mask candidate was filtered out");
  const CoverResult cover = greedy_cover(table, pruned, params.cover);
  eliminate(pruned, cover.selected, "cover", [&](std::size_t) { return "overlaps a selected mask"; });
  report.selected = cover.selected;
  std::sort(report.selected.begin(), report.selected.end());
  report.coverage = cover.coverage;
  report.below_target = cover.below_target;
  if (cover.below_target) {
    spdlog::warn("selected masks cover {:.3f} of the candidate area, below {:.2f}", cover.coverage,
                 params.cover.coverage);
  }
  return report;
}

std::string filter_report_to_json(const FilterReport& report) {
  nlohmann::ordered_json j;
  j["scene_area_m2"] = report.scene_area_m2;
  j["area_lower_bound_m2"] = report.area_lower_bound;
  j["area_upper_bound_m2"] = std::isfinite(report.area_upper_bound) ? nlohmann::ordered_json(report.area_upper_bound)
                                                                      : nlohmann::ordered_json(nullptr);
  j["coverage"] = report.coverage;
  j["below_target"] = report.below_target;
  j["selected"] = nlohmann::ordered_json::array();
  for (std::size_t i : report.selected) j["selected"].push_back(report.stats[i].id);
  j["masks"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < report.stats.size(); ++i) {
    const MaskStats& s = report.stats[i];
    nlohmann::ordered_json e;
    e["id"] = s.id;
    e["area_px"] = s.area_px;
    e["area_m2"] = s.area_m2;
    e["components"] = s.component_count;
    e["holes"] = s.hole_count;
    e["points"] = s.point_count;
    e["stage"] = report.decisions[i].stage;
    if (!report.decisions[i].reason.empty()) e["reason"] = report.decisions[i].reason;
    j["masks"].push_back(std::move(e));
  }
  j["groups"] = nlohmann::ordered_json::array();
  for (const MaskGroup& g : report.groups) {
    nlohmann::ordered_json e;
    e["representative"] = report.stats[g.representative].id;
    e["members"] = nlohmann::ordered_json::array();
    for (std::size_t m : g.members) e["members"].push_back(report.stats[m].id);
    j["groups"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

}  // namespace roomtrace
