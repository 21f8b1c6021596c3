// Copyright 2026 The roomtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "roomtrace/ceiling_filter.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "roomtrace/error.hpp"
#include "support.hpp"

namespace roomtrace {
namespace {

using testing::Rng;
using testing::thrown_code;

TEST(GridCell, FloorOfOffsets) {
  EXPECT_EQ(grid_cell_of({0.0, 0.0, 0}, 0.0, 0.0, 0.1), (GridCell{0, 0}));
  EXPECT_EQ(grid_cell_of({0.25, 0.31, 0}, 0.0, 0.0, 0.1), (GridCell{2, 3}));
  EXPECT_EQ(grid_cell_of({-1.0, 4.0, 0}, -1.05, 3.0, 0.1), (GridCell{0, 10}));
}

TEST(CeilingFilter, KeepsTopOfEachCell) {
  // Two columns: one with a ceiling at 3 and a floor at 0, one lower shelf.
  const PointCloud pc({{0.05, 0.05, 3.0}, {0.05, 0.05, 0.0}, {0.05, 0.05, 2.95}, {0.55, 0.05, 1.0}});
  const auto idx = ceiling_filter_indices(pc, {0.1, 0.1, CeilingMaxMode::kPerCell});
  EXPECT_EQ(idx, (std::vector<std::size_t>{0, 2, 3}));
  const auto global = ceiling_filter_indices(pc, {0.1, 0.1, CeilingMaxMode::kGlobal});
  EXPECT_EQ(global, (std::vector<std::size_t>{0, 2}));
}

TEST(CeilingFilter, FilteredCloudPreservesOrder) {
  Rng rng(2);
  const PointCloud pc = testing::random_room_cloud(rng, 3000);
  const auto idx = ceiling_filter_indices(pc);
  const PointCloud out = grid_ceiling_filter(pc);
  ASSERT_EQ(out.size(), idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) EXPECT_EQ(out[k], pc[idx[k]]);
}

TEST(CeilingFilterProperty, MatchesPerCellOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const std::size_t n = static_cast<std::size_t>(testing::uniform_int(rng, 1, 5000));
    const PointCloud pc = testing::random_room_cloud(rng, n);
    const double gamma = testing::uniform(rng, 0.05, 0.5);
    const double dz = testing::uniform(rng, 0.02, 0.3);
    EXPECT_EQ(ceiling_filter_indices(pc, {gamma, dz, CeilingMaxMode::kPerCell}),
              testing::oracle_ceiling_indices(pc, gamma, dz))
        << "seed " << seed;
  }
}

TEST(CeilingFilterProperty, GlobalModeIsAThresholdOnZ) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const PointCloud pc = testing::random_room_cloud(rng, 2000);
    const double zmax = pc.bounds().z_max;
    std::vector<std::size_t> expect;
    for (std::size_t i = 0; i < pc.size(); ++i) {
      if (pc[i].z >= zmax - 0.1) expect.push_back(i);
    }
    EXPECT_EQ(ceiling_filter_indices(pc, {0.1, 0.1, CeilingMaxMode::kGlobal}), expect);
  }
}

TEST(CeilingFilter, InvalidParamsAndEmpty) {
  const PointCloud pc({{0, 0, 0}});
  EXPECT_EQ(thrown_code([&] { ceiling_filter_indices(pc, {0.0, 0.1}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(thrown_code([&] { ceiling_filter_indices(pc, {0.1, -0.1}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(thrown_code([&] { ceiling_filter_indices(PointCloud{}); }), ErrorCode::kEmptyCloud);
}

PointCloud plane_with_outliers(Rng& rng, std::size_t inliers, std::size_t outliers) {
  std::vector<Point3> pts;
  for (std::size_t i = 0; i < inliers; ++i) {
    pts.push_back({testing::uniform(rng, 0, 5), testing::uniform(rng, 0, 4), 3.0 + testing::uniform(rng, -0.01, 0.01)});
  }
  for (std::size_t i = 0; i < outliers; ++i) {
    pts.push_back({testing::uniform(rng, 0, 5), testing::uniform(rng, 0, 4), testing::uniform(rng, 0, 2.5)});
  }
  return PointCloud(pts);
}

TEST(Ransac, RecoversHorizontalPlane) {
  Rng rng(7);
  const PointCloud pc = plane_with_outliers(rng, 800, 200);
  const PlaneModel m = ransac_plane(pc, {0.05, 500, 1});
  EXPECT_NEAR(m.normal[2], 1.0, 1e-3);
  EXPECT_NEAR(m.d, -3.0, 5e-3);
  EXPECT_GE(m.inliers.size(), 800u);
  for (std::size_t i : m.inliers) EXPECT_LE(std::abs(m.signed_distance(pc[i])), 0.05);
}

TEST(Ransac, CanonicalSignAndUnitNormal) {
  Rng rng(8);
  const PointCloud pc = plane_with_outliers(rng, 300, 0);
  const PlaneModel m = ransac_plane(pc, {0.05, 100, 3});
  const double len = std::hypot(m.normal[0], m.normal[1], m.normal[2]);
  EXPECT_NEAR(len, 1.0, 1e-12);
  EXPECT_GT(m.normal[2], 0.0);
}

TEST(Ransac, SameSeedSameModel) {
  Rng rng(9);
  const PointCloud pc = plane_with_outliers(rng, 500, 500);
  const PlaneModel a = ransac_plane(pc, {0.05, 200, 42});
  const PlaneModel b = ransac_plane(pc, {0.05, 200, 42});
  EXPECT_EQ(a.normal, b.normal);
  EXPECT_EQ(a.d, b.d);
  EXPECT_EQ(a.inliers, b.inliers);
}

TEST(RansacProperty, InlierCountMonotoneInIterations) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const PointCloud pc = plane_with_outliers(rng, 300, 700);
    std::size_t prev = 0;
    for (int iters : {1, 5, 20, 100, 400}) {
      const std::size_t count = ransac_plane(pc, {0.05, iters, seed}).inliers.size();
      EXPECT_GE(count, prev) << "seed " << seed << " iters " << iters;
      prev = count;
    }
  }
}

TEST(Ransac, CollinearIsDegenerate) {
  const PointCloud pc({{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {3, 3, 3}});
  EXPECT_EQ(thrown_code([&] { ransac_plane(pc); }), ErrorCode::kDegenerateGeometry);
}

}  // namespace
}  // namespace roomtrace
