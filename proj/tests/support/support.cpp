// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numbers>
#include <tuple>

namespace roomtrace::testing {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::optional<ErrorCode> thrown_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("roomtrace-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

PointCloud random_room_cloud(Rng& rng, std::size_t n, double w, double d) {
  std::normal_distribution<double> noise(0.0, 0.02);
  std::vector<Point3> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = uniform(rng, 0.0, w), y = uniform(rng, 0.0, d);
    double z = 0.0;
    switch (uniform_int(rng, 0, 3)) {
      case 0: z = 3.0 + noise(rng); break;
      case 1: z = 2.9 + 0.05 * x / w + noise(rng); break;
      case 2: z = uniform(rng, 0.0, 2.5); break;
      default: z = noise(rng); break;
    }
    pts.push_back({x, y, z});
  }
  return PointCloud(std::move(pts));
}

ByteRaster random_raster(Rng& rng, int width, int height) {
  ByteRaster img(width, height, 0);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(uniform_int(rng, 0, 60));
  const int blobs = uniform_int(rng, 3, 10);
  for (int b = 0; b < blobs; ++b) {
    const int cm = uniform_int(rng, 0, width - 1), cn = uniform_int(rng, 0, height - 1);
    const int r = uniform_int(rng, 1, 6);
    const int peak = uniform_int(rng, 100, 255);
    const bool plateau = uniform_int(rng, 0, 2) == 0;
    for (int n = std::max(0, cn - r); n <= std::min(height - 1, cn + r); ++n) {
      for (int m = std::max(0, cm - r); m <= std::min(width - 1, cm + r); ++m) {
        const double dist = std::hypot(m - cm, n - cn);
        if (dist > r) continue;
        const int v = plateau ? peak : static_cast<int>(peak * (1.0 - 0.5 * dist / r));
        img.at(m, n) = static_cast<std::uint8_t>(std::max<int>(img.at(m, n), v));
      }
    }
  }
  return img;
}

namespace {

ByteRaster rect_mask(int size, int m0, int n0, int m1, int n1) {
  ByteRaster r(size, size, 0);
  for (int n = std::max(0, n0); n <= std::min(size - 1, n1); ++n) {
    for (int m = std::max(0, m0); m <= std::min(size - 1, m1); ++m) r.at(m, n) = 1;
  }
  return r;
}

std::size_t popcount(const ByteRaster& r) {
  return static_cast<std::size_t>(std::count_if(r.data().begin(), r.data().end(), [](auto v) { return v != 0; }));
}

auto rank_key(const MaskStats& s) { return std::tie(s.area_px, s.point_count, s.id); }

}  // namespace

std::vector<MaskImage> random_mask_instance(Rng& rng, int size, int max_masks) {
  const int target = uniform_int(rng, 1, max_masks);
  std::vector<ByteRaster> rasters;
  while (static_cast<int>(rasters.size()) < target) {
    const int kind = rasters.empty() ? 0 : uniform_int(rng, 0, 4);
    ByteRaster r;
    if (kind <= 1) {
      const int m0 = uniform_int(rng, 0, size - 3), n0 = uniform_int(rng, 0, size - 3);
      r = rect_mask(size, m0, n0, m0 + uniform_int(rng, 1, size / 2), n0 + uniform_int(rng, 1, size / 2));
    } else {
      const ByteRaster& src = rasters[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(rasters.size()) - 1))];
      r = src;
      if (kind == 2) {
        // Near copy: shifted by at most one pixel.
        const int dm = uniform_int(rng, -1, 1), dn = uniform_int(rng, -1, 1);
        ByteRaster s(size, size, 0);
        for (int n = 0; n < size; ++n) {
          for (int m = 0; m < size; ++m) {
            if (src.at(m, n) && s.contains(m + dm, n + dn)) s.at(m + dm, n + dn) = 1;
          }
        }
        r = s;
      } else if (kind == 3) {
        // Part: src clipped to a random sub-rectangle.
        const int m0 = uniform_int(rng, 0, size - 1), n0 = uniform_int(rng, 0, size - 1);
        const ByteRaster box = rect_mask(size, m0, n0, m0 + uniform_int(rng, 2, size), n0 + uniform_int(rng, 2, size));
        for (std::size_t i = 0; i < r.size(); ++i) r.data()[i] = r.data()[i] && box.data()[i];
      } else {
        // Union with another mask.
        const ByteRaster& other = rasters[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(rasters.size()) - 1))];
        for (std::size_t i = 0; i < r.size(); ++i) r.data()[i] = r.data()[i] || other.data()[i];
      }
    }
    if (popcount(r) > 0) rasters.push_back(std::move(r));
  }
  std::vector<MaskImage> masks;
  for (std::size_t i = 0; i < rasters.size(); ++i) {
    MaskImage mask;
    mask.id = "m" + std::to_string(i);
    mask.pixels = std::move(rasters[i]);
    masks.push_back(std::move(mask));
  }
  return masks;
}

MaskStats stats_for(const MaskImage& mask, std::size_t point_count) {
  MaskStats s;
  s.id = mask.id;
  s.area_px = popcount(mask.pixels);
  s.area_m2 = static_cast<double>(s.area_px);
  s.component_count = 1;
  s.point_count = point_count;
  return s;
}

std::vector<Vec2> random_rectilinear_room(Rng& rng) {
  const double w = uniform(rng, 3.0, 8.0), h = uniform(rng, 3.0, 6.0);
  auto notch = [&]() -> std::pair<double, double> {
    if (uniform_int(rng, 0, 1) == 0) return {0.0, 0.0};
    return {uniform(rng, 0.8, w / 3.0), uniform(rng, 0.8, h / 3.0)};
  };
  std::vector<Vec2> ring;
  const auto [a0, b0] = notch();
  if (a0 > 0.0) {
    ring.insert(ring.end(), {{0.0, b0}, {a0, b0}, {a0, 0.0}});
  } else {
    ring.push_back({0.0, 0.0});
  }
  const auto [a1, b1] = notch();
  if (a1 > 0.0) {
    ring.insert(ring.end(), {{w - a1, 0.0}, {w - a1, b1}, {w, b1}});
  } else {
    ring.push_back({w, 0.0});
  }
  const auto [a2, b2] = notch();
  if (a2 > 0.0) {
    ring.insert(ring.end(), {{w, h - b2}, {w - a2, h - b2}, {w - a2, h}});
  } else {
    ring.push_back({w, h});
  }
  const auto [a3, b3] = notch();
  if (a3 > 0.0) {
    ring.insert(ring.end(), {{a3, h}, {a3, h - b3}, {0.0, h - b3}});
  } else {
    ring.push_back({0.0, h});
  }
  return ring;
}

std::vector<Vec2> rotate_ring(const std::vector<Vec2>& ring, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  std::vector<Vec2> out;
  out.reserve(ring.size());
  for (const Vec2& p : ring) out.push_back({c * p.x - s * p.y, s * p.x + c * p.y});
  return out;
}

std::vector<Vec2> perturb_room(Rng& rng, const std::vector<Vec2>& ring, double step, double noise, double theta) {
  std::normal_distribution<double> g(0.0, noise);
  std::vector<Vec2> dense;
  for (std::size_t k = 0; k < ring.size(); ++k) {
    const Vec2 a = ring[k], b = ring[(k + 1) % ring.size()];
    const int pieces = std::max(1, static_cast<int>(std::round(distance(a, b) / step)));
    for (int i = 0; i < pieces; ++i) {
      const double t = static_cast<double>(i) / pieces;
      dense.push_back(a + (b - a) * t);
    }
  }
  for (Vec2& p : dense) p = {p.x + g(rng), p.y + g(rng)};
  return rotate_ring(dense, theta);
}

RoomTrial regularize_perturbed_room(std::uint64_t seed, double noise) {
  Rng rng(seed);
  const std::vector<Vec2> room = random_rectilinear_room(rng);
  const double rot = uniform(rng, -std::numbers::pi / 4.0, std::numbers::pi / 4.0);
  RoomTrial trial;
  trial.truth = rotate_ring(room, rot);
  const std::vector<Vec2> traced = perturb_room(rng, room, 0.05, noise, rot);

  std::vector<Vec2> evidence = perturb_room(rng, room, 0.03, noise, rot);
  double x0 = room[0].x, x1 = room[0].x, y0 = room[0].y, y1 = room[0].y;
  for (const Vec2& p : room) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  std::vector<Vec2> interior;
  const int n_inside = static_cast<int>(7.0 * (x1 - x0) * (y1 - y0));
  for (int k = 0; k < n_inside; ++k) {
    const Vec2 p{uniform(rng, x0, x1), uniform(rng, y0, y1)};
    if (point_in_polygon(p, room)) interior.push_back(p);
  }
  interior = rotate_ring(interior, rot);
  evidence.insert(evidence.end(), interior.begin(), interior.end());
  const BoundaryPointSet boundary = extract_boundary_points(evidence, 0.2, deg_to_rad(30.0));

  const std::vector<Vec2> simplified = rdp_simplify(traced, 0.1);
  trial.theta = main_direction(simplified);
  trial.regularized = regularize(simplified, trial.theta);
  trial.fused = fuse_correct(trial.regularized.ring, boundary, {0.01, 0.3, CorrectionMode::kPerEdge});
  return trial;
}

double max_axis_deviation(const std::vector<Vec2>& ring, double theta) {
  double worst = 0.0;
  for (std::size_t k = 0; k < ring.size(); ++k) {
    const Vec2 d = ring[(k + 1) % ring.size()] - ring[k];
    if (d.x == 0.0 && d.y == 0.0) return std::numbers::pi / 4.0;
    double a = std::fmod(std::atan2(d.y, d.x) - theta, std::numbers::pi / 2.0);
    if (a < 0.0) a += std::numbers::pi / 2.0;
    worst = std::max(worst, std::min(a, std::numbers::pi / 2.0 - a));
  }
  return worst;
}

std::vector<std::size_t> oracle_ceiling_indices(const PointCloud& cloud, double gamma, double delta_z) {
  const auto& pts = cloud.points();
  double x_min = pts[0].x, y_min = pts[0].y;
  for (const Point3& p : pts) {
    x_min = std::min(x_min, p.x);
    y_min = std::min(y_min, p.y);
  }
  auto cell = [&](const Point3& p) {
    return std::pair{static_cast<long long>(std::floor((p.x - x_min) / gamma)),
                     static_cast<long long>(std::floor((p.y - y_min) / gamma))};
  };
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto c = cell(pts[i]);
    double zmax = pts[i].z;
    for (const Point3& q : pts) {
      if (cell(q) == c) zmax = std::max(zmax, q.z);
    }
    if (pts[i].z >= zmax - delta_z) keep.push_back(i);
  }
  return keep;
}

std::vector<bool> oracle_boundary_flags(const std::vector<Vec2>& points, double radius, double sector) {
  std::vector<bool> flags(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::vector<double> az;
    for (std::size_t j = 0; j < points.size(); ++j) {
      const double dx = points[j].x - points[i].x, dy = points[j].y - points[i].y;
      const double d = std::sqrt(dx * dx + dy * dy);
      if (j != i && d > 0.0 && d <= radius) az.push_back(std::atan2(dy, dx));
    }
    if (az.empty()) {
      flags[i] = true;
      continue;
    }
    std::sort(az.begin(), az.end());
    double gap = 2.0 * std::numbers::pi - (az.back() - az.front());
    for (std::size_t k = 0; k + 1 < az.size(); ++k) gap = std::max(gap, az[k + 1] - az[k]);
    flags[i] = gap >= sector;
  }
  return flags;
}

std::vector<PromptPoint> oracle_peaks(const ByteRaster& image, int pool, double tau) {
  const int h = pool / 2;
  std::vector<PromptPoint> out;
  for (int n = 0; n < image.height(); ++n) {
    for (int m = 0; m < image.width(); ++m) {
      int best = 0;
      for (int dn = -h; dn <= h; ++dn) {
        for (int dm = -h; dm <= h; ++dm) {
          if (image.contains(m + dm, n + dn)) best = std::max<int>(best, image.at(m + dm, n + dn));
        }
      }
      const int v = image.at(m, n);
      if (v == best && v >= tau) out.push_back({m, n, static_cast<double>(v)});
    }
  }
  return out;
}

double oracle_iou(const ByteRaster& a, const ByteRaster& b) {
  std::size_t inter = 0, uni = 0;
  for (int n = 0; n < a.height(); ++n) {
    for (int m = 0; m < a.width(); ++m) {
      inter += (a.at(m, n) && b.at(m, n)) ? 1 : 0;
      uni += (a.at(m, n) || b.at(m, n)) ? 1 : 0;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double oracle_containment(const ByteRaster& a, const ByteRaster& b) {
  std::size_t inter = 0, nb = 0;
  for (int n = 0; n < a.height(); ++n) {
    for (int m = 0; m < a.width(); ++m) {
      inter += (a.at(m, n) && b.at(m, n)) ? 1 : 0;
      nb += b.at(m, n) ? 1 : 0;
    }
  }
  return nb == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(nb);
}

std::vector<std::vector<std::size_t>> oracle_components(const std::vector<MaskImage>& masks,
                                                        const std::vector<std::size_t>& candidates,
                                                        double thresh) {
  const std::size_t k = candidates.size();
  // Reachability by repeated relaxation over the full adjacency matrix.
  std::vector<std::vector<bool>> reach(k, std::vector<bool>(k, false));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      reach[i][j] = i == j || oracle_iou(masks[candidates[i]].pixels, masks[candidates[j]].pixels) >= thresh;
    }
  }
  for (std::size_t via = 0; via < k; ++via) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        if (reach[i][via] && reach[via][j]) reach[i][j] = true;
      }
    }
  }
  std::vector<std::vector<std::size_t>> comps;
  std::vector<bool> seen(k, false);
  for (std::size_t i = 0; i < k; ++i) {
    if (seen[i]) continue;
    std::vector<std::size_t> comp;
    for (std::size_t j = 0; j < k; ++j) {
      if (reach[i][j]) {
        comp.push_back(j);
        seen[j] = true;
      }
    }
    comps.push_back(comp);
  }
  return comps;
}

std::size_t oracle_best(const std::vector<MaskStats>& stats, const std::vector<std::size_t>& members) {
  std::size_t best = members.front();
  for (std::size_t m : members) {
    if (rank_key(stats[m]) > rank_key(stats[best])) best = m;
  }
  return best;
}

std::vector<std::size_t> oracle_dedup(const std::vector<MaskImage>& masks, const std::vector<MaskStats>& stats,
                                      const std::vector<std::size_t>& candidates, double thresh) {
  std::vector<std::size_t> winners;
  for (const auto& comp : oracle_components(masks, candidates, thresh)) {
    std::vector<std::size_t> members;
    for (std::size_t p : comp) members.push_back(candidates[p]);
    winners.push_back(oracle_best(stats, members));
  }
  std::vector<std::size_t> out;
  for (std::size_t c : candidates) {
    if (std::find(winners.begin(), winners.end(), c) != winners.end()) out.push_back(c);
  }
  return out;
}

std::vector<MaskGroup> oracle_groups(const std::vector<MaskImage>& masks, const std::vector<MaskStats>& stats,
                                     const std::vector<std::size_t>& candidates, double thresh) {
  std::vector<MaskGroup> groups;
  for (const auto& comp : oracle_components(masks, candidates, thresh)) {
    MaskGroup g;
    for (std::size_t p : comp) g.members.push_back(candidates[p]);
    g.representative = oracle_best(stats, g.members);
    groups.push_back(g);
  }
  return groups;
}

std::vector<std::size_t> oracle_inclusion(const std::vector<MaskImage>& masks, const std::vector<MaskStats>& stats,
                                          const std::vector<std::size_t>& candidates, double incl,
                                          double iqr_factor) {
  std::vector<int> memo(masks.size(), -1);
  std::function<bool(std::size_t)> survives = [&](std::size_t c) -> bool {
    if (memo[c] >= 0) return memo[c] == 1;
    bool ok = true;
    for (std::size_t k : candidates) {
      if (k == c || !(rank_key(stats[k]) > rank_key(stats[c]))) continue;
      if (survives(k) && oracle_containment(masks[k].pixels, masks[c].pixels) >= incl) {
        ok = false;
        break;
      }
    }
    memo[c] = ok ? 1 : 0;
    return ok;
  };
  std::vector<std::size_t> first;
  for (std::size_t c : candidates) {
    if (survives(c)) first.push_back(c);
  }
  std::vector<double> areas;
  for (std::size_t c : first) areas.push_back(stats[c].area_m2);
  std::sort(areas.begin(), areas.end());
  auto q = [&](double p) {
    const double h = (static_cast<double>(areas.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, areas.size() - 1);
    return areas[lo] + (h - static_cast<double>(lo)) * (areas[hi] - areas[lo]);
  };
  const double upper = areas.empty() ? 0.0 : q(0.75) + iqr_factor * (q(0.75) - q(0.25));
  std::vector<std::size_t> out;
  for (std::size_t c : first) {
    if (stats[c].area_m2 <= upper) out.push_back(c);
  }
  return out;
}

double oracle_best_coverage(const std::vector<MaskImage>& masks, const std::vector<std::size_t>& candidates,
                            double iou_tol) {
  const std::size_t k = candidates.size();
  ByteRaster uni(masks[candidates[0]].pixels.width(), masks[candidates[0]].pixels.height(), 0);
  std::vector<std::size_t> area(k);
  for (std::size_t i = 0; i < k; ++i) {
    const ByteRaster& r = masks[candidates[i]].pixels;
    area[i] = popcount(r);
    for (std::size_t p = 0; p < r.size(); ++p) uni.data()[p] = uni.data()[p] || r.data()[p];
  }
  const double total = static_cast<double>(popcount(uni));
  std::vector<std::vector<bool>> clash(k, std::vector<bool>(k, false));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      clash[i][j] = i != j && oracle_iou(masks[candidates[i]].pixels, masks[candidates[j]].pixels) > iou_tol;
    }
  }
  double best = 0.0;
  for (std::uint32_t subset = 1; subset < (1U << k); ++subset) {
    bool feasible = true;
    std::size_t sum = 0;
    for (std::size_t i = 0; i < k && feasible; ++i) {
      if (!(subset & (1U << i))) continue;
      sum += area[i];
      for (std::size_t j = i + 1; j < k; ++j) {
        if ((subset & (1U << j)) && clash[i][j]) {
          feasible = false;
          break;
        }
      }
    }
    if (feasible) best = std::max(best, static_cast<double>(sum) / total);
  }
  return best;
}

}  // namespace roomtrace::testing
