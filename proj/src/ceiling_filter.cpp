// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "roomtrace/ceiling_filter.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

#include "roomtrace/error.hpp"

namespace roomtrace {
namespace {

std::uint64_t cell_key(const GridCell& c) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.m)) << 32) |
         static_cast<std::uint32_t>(c.n);
}

void canonicalize(PlaneModel& plane) {
  auto& nrm = plane.normal;
  const double pivot = std::abs(nrm[2]) > 1e-12 ? nrm[2] : std::abs(nrm[1]) > 1e-12 ? nrm[1] : nrm[0];
  if (pivot < 0.0) {
    for (double& v : nrm) v = -v;
    plane.d = -plane.d;
  }
}

std::vector<std::size_t> collect_inliers(const PointCloud& cloud, const PlaneModel& plane,
                                         double thresh) {
  std::vector<std::size_t> inliers;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (std::abs(plane.signed_distance(cloud[i])) <= thresh) inliers.push_back(i);
  }
  return inliers;
}

std::size_t count_inliers(const PointCloud& cloud, const PlaneModel& plane, double thresh) {
  std::size_t count = 0;
  for (const Point3& p : cloud) count += std::abs(plane.signed_distance(p)) <= thresh ? 1 : 0;
  return count;
}

bool plane_through(const Point3& a, const Point3& b, const Point3& c, PlaneModel& out) {
  const Eigen::Vector3d pa(a.x, a.y, a.z), pb(b.x, b.y, b.z), pc(c.x, c.y, c.z);
  const Eigen::Vector3d n = (pb - pa).cross(pc - pa);
  const double len = n.norm();
  const double scale = std::max((pb - pa).squaredNorm(), (pc - pa).squaredNorm());
  if (!(len > 1e-12 * scale) || len == 0.0) return false;
  const Eigen::Vector3d u = n / len;
  out.normal = {u.x(), u.y(), u.z()};
  out.d = -u.dot(pa);
  return true;
}

PlaneModel least_squares_plane(const PointCloud& cloud, const std::vector<std::size_t>& idx) {
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (std::size_t i : idx) centroid += Eigen::Vector3d(cloud[i].x, cloud[i].y, cloud[i].z);
  centroid /= static_cast<double>(idx.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t i : idx) {
    const Eigen::Vector3d d = Eigen::Vector3d(cloud[i].x, cloud[i].y, cloud[i].z) - centroid;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  const Eigen::Vector3d n = solver.eigenvectors().col(0).normalized();
  PlaneModel plane;
  plane.normal = {n.x(), n.y(), n.z()};
  plane.d = -n.dot(centroid);
  return plane;
}

bool all_collinear(const PointCloud& cloud) {
  const Point3& p0 = cloud[0];
  std::size_t far = 0;
  double best = 0.0;
  for (std::size_t i = 1; i < cloud.size(); ++i) {
    const double d = std::hypot(cloud[i].x - p0.x, cloud[i].y - p0.y, cloud[i].z - p0.z);
    if (d > best) {
      best = d;
      far = i;
    }
  }
  if (best == 0.0) return true;
  PlaneModel scratch;
  for (std::size_t i = 1; i < cloud.size(); ++i) {
    if (i != far && plane_through(p0, cloud[far], cloud[i], scratch)) return false;
  }
  return true;
}

}  // namespace

GridCell grid_cell_of(const Point3& p, double x_min, double y_min, double gamma) {
  return {static_cast<std::int64_t>(std::floor((p.x - x_min) / gamma)),
          static_cast<std::int64_t>(std::floor((p.y - y_min) / gamma))};
}

std::vector<std::size_t> ceiling_filter_indices(const PointCloud& cloud,
                                                const CeilingFilterParams& params) {
  cloud.require_non_empty("filter-ceiling");
  if (!(params.gamma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "gamma must be positive");
  if (!(params.delta_z >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "delta_z must be >= 0");
  const Bounds3& b = cloud.bounds();

  std::vector<std::size_t> kept;
  if (params.mode == CeilingMaxMode::kGlobal) {
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (cloud[i].z >= b.z_max - params.delta_z) kept.push_back(i);
    }
    return kept;
  }

  std::unordered_map<std::uint64_t, double> cell_max;
  cell_max.reserve(cloud.size() / 4 + 1);
  std::vector<std::uint64_t> keys(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    keys[i] = cell_key(grid_cell_of(cloud[i], b.x_min, b.y_min, params.gamma));
    auto [it, inserted] = cell_max.try_emplace(keys[i], cloud[i].z);
    if (!inserted && cloud[i].z > it->second) it->second = cloud[i].z;
  }
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cloud[i].z >= cell_max.at(keys[i]) - params.delta_z) kept.push_back(i);
  }
  return kept;
}

PointCloud grid_ceiling_filter(const PointCloud& cloud, const CeilingFilterParams& params) {
  const auto kept = ceiling_filter_indices(cloud, params);
  std::vector<Point3> out;
  out.reserve(kept.size());
  for (std::size_t i : kept) out.push_back(cloud[i]);
  return PointCloud(std::move(out));
}

PlaneModel ransac_plane(const PointCloud& cloud, const RansacParams& params) {
  if (!(params.dist_thresh > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "RANSAC distance threshold must be positive");
  }
  if (cloud.size() < 3 || all_collinear(cloud)) {
    throw Error(ErrorCode::kDegenerateGeometry, "RANSAC needs three non-collinear points");
  }
  std::mt19937_64 rng(params.seed);
  std::uniform_int_distribution<std::size_t> pick(0, cloud.size() - 1);

  PlaneModel best;
  std::size_t best_sample_count = 0;
  std::size_t best_final_count = 0;
  bool have_best = false;

  for (int iter = 0; iter < params.max_iters; ++iter) {
    std::size_t i0 = pick(rng), i1 = pick(rng), i2 = pick(rng);
    if (i0 == i1 || i1 == i2 || i0 == i2) continue;
    PlaneModel sample;
    if (!plane_through(cloud[i0], cloud[i1], cloud[i2], sample)) continue;
    const std::size_t count = count_inliers(cloud, sample, params.dist_thresh);
    if (count <= best_sample_count) continue;
    best_sample_count = count;

    // Refit on the consensus set; keep whichever plane holds more inliers.
    PlaneModel refit = least_squares_plane(cloud, collect_inliers(cloud, sample, params.dist_thresh));
    const std::size_t refit_count = count_inliers(cloud, refit, params.dist_thresh);
    PlaneModel& chosen = refit_count >= count ? refit : sample;
    const std::size_t final_count = std::max(refit_count, count);
    if (final_count > best_final_count) {
      best_final_count = final_count;
      best = chosen;
      have_best = true;
    }
  }

  if (!have_best) {
    // Every draw was degenerate; fall back to the first non-collinear triple.
    for (std::size_t i = 2; i < cloud.size() && !have_best; ++i) {
      for (std::size_t j = 1; j < i && !have_best; ++j) {
        if (plane_through(cloud[0], cloud[j], cloud[i], best)) have_best = true;
      }
    }
  }
  best.inliers = collect_inliers(cloud, best, params.dist_thresh);
  canonicalize(best);
  return best;
}

}  // namespace roomtrace
