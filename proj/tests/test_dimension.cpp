#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "flatlab/dimension.hpp"

using namespace flatlab;

namespace {

// Kept base-b indices at the given depth, built digit by digit.
std::vector<std::uint64_t> kept_oracle(int base, const std::vector<int>& digits, int depth) {
  std::vector<std::uint64_t> out{0};
  for (int d = 0; d < depth; ++d) {
    std::vector<std::uint64_t> next;
    for (auto v : out)
      for (int dig : digits) next.push_back(v * base + dig);
    out = std::move(next);
  }
  return out;
}

// Dyadic cells of level l meeting some [i, i+1) / base^depth.
std::uint64_t dyadic_count_oracle(int base, const std::vector<int>& digits, int depth, int l) {
  std::uint64_t scale = 1;
  for (int d = 0; d < depth; ++d) scale *= base;
  std::set<std::uint64_t> cells;
  for (auto i : kept_oracle(base, digits, depth)) {
    // j / 2^l < (i+1)/scale and (j+1)/2^l > i/scale.
    for (std::uint64_t j = (i << l) / scale; j * scale < ((i + 1) << l); ++j)
      if ((j + 1) * scale > (i << l)) cells.insert(j);
  }
  return cells.size();
}

}  // namespace

TEST(GridSet, NormalizesAndChecksRange) {
  const GridSet g = GridSet::from_cells(2, 2, {3, 1, 0, 0, 3, 1});
  EXPECT_EQ(g.size(), 2u);
  EXPECT_EQ(g.cell(0)[0], 0u);
  EXPECT_THROW(GridSet::from_cells(2, 2, {4, 0}), ParameterError);
  EXPECT_THROW(GridSet::from_cells(2, 2, {1, 0, 1}), ParameterError);
}

TEST(BoxCount, FullCubeAndPoint) {
  for (int n = 1; n <= 3; ++n) {
    const GridSet full = GridSet::full_cube(n, 5);
    for (int l = 0; l <= 5; ++l) EXPECT_EQ(box_count(full, l), std::uint64_t{1} << (n * l));
  }
  const GridSet pt = GridSet::from_cells(3, 8, {17, 200, 3});
  for (int l = 0; l <= 8; ++l) EXPECT_EQ(box_count(pt, l), 1u);
  EXPECT_THROW(box_count(pt, 9), ParameterError);
}

TEST(BoxCount, CantorMatchesIntervalOracle) {
  for (int depth : {3, 5, 8}) {
    const GridSet g = cantor_grid(1, 3, {{0, 2}}, depth);
    for (int l = 1; l <= g.level(); ++l)
      EXPECT_EQ(box_count(g, l), dyadic_count_oracle(3, {0, 2}, depth, l)) << depth << "," << l;
  }
  const GridSet g5 = cantor_grid(1, 5, {{1, 3, 4}}, 4);
  for (int l = 1; l <= g5.level(); ++l) EXPECT_EQ(box_count(g5, l), dyadic_count_oracle(5, {1, 3, 4}, 4, l));
}

TEST(BoxCount, DownsamplingConsistency) {
  const GridSet g = cantor_grid(2, 3, {{0, 2}, {1}}, 6);
  for (int l = 1; l <= g.level(); ++l) {
    EXPECT_LE(box_count(g, l - 1), box_count(g, l));
    EXPECT_LE(box_count(g, l), 4 * box_count(g, l - 1));
  }
  // Every cell has an occupied parent.
  const GridSet parents = g.downsample(5);
  std::set<std::pair<std::uint32_t, std::uint32_t>> occupied;
  for (std::size_t i = 0; i < parents.size(); ++i) occupied.emplace(parents.cell(i)[0], parents.cell(i)[1]);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto c = g.cell(i);
    EXPECT_TRUE(occupied.count({c[0] >> (g.level() - 5), c[1] >> (g.level() - 5)}));
  }
}

TEST(Cantor, ConstructionCounts) {
  for (int d = 0; d <= 8; ++d) {
    const auto pts = cantor_points(1, 3, {{0, 2}}, d);
    EXPECT_EQ(pts.size(), std::size_t{1} << d);
    std::set<double> distinct;
    for (const auto& p : pts) distinct.insert(p(0));
    EXPECT_EQ(distinct.size(), pts.size());
  }
  EXPECT_THROW(cantor_grid(2, 3, {{0, 2}}, 13), ParameterError);
  EXPECT_THROW(cantor_grid(1, 3, {{}}, 3), ParameterError);
  EXPECT_NEAR(pattern_dimension(3, {{0, 2}, {0, 1, 2}}), 1.0 + std::log(2.0) / std::log(3.0), 1e-12);
}

TEST(Cantor, AllDigitsGivesFullCube) {
  const GridSet g = cantor_grid(2, 2, {{0, 1}}, 5);
  EXPECT_EQ(g, GridSet::full_cube(2, 5));
}

TEST(Estimate, FullSquareAndPoint) {
  const DimensionEstimate full = estimate_dimension(GridSet::full_cube(2, 8), 2, 8);
  EXPECT_NEAR(full.slope, 2.0, 1e-9);
  EXPECT_NEAR(full.r2, 1.0, 1e-12);
  const DimensionEstimate pt = estimate_dimension(GridSet::from_cells(2, 8, {5, 9}), 1, 8);
  EXPECT_NEAR(pt.slope, 0.0, 1e-12);
  EXPECT_THROW(estimate_dimension(GridSet::full_cube(2, 8), 4, 4), ParameterError);
  EXPECT_THROW(estimate_dimension(GridSet::full_cube(2, 8), 2, 9), ParameterError);
}

TEST(Estimate, CantorFineRangeApproachesSimilarityDimension) {
  const double target = std::log(2.0) / std::log(3.0);
  const GridSet g = cantor_grid(1, 3, {{0, 2}}, 15);
  EXPECT_NEAR(estimate_dimension(g, 6, g.level()).slope, target, 0.03);
}

TEST(Estimate, SlopeWithinRange) {
  for (const GridSet& g : {cantor_grid(2, 3, {{0, 2}}, 6), cantor_grid(3, 3, {{1}}, 4),
                           cantor_grid(3, 5, {{0, 2, 4}}, 3)}) {
    const DimensionEstimate e = estimate_dimension(g);
    EXPECT_GE(e.slope, 0.0);
    EXPECT_LE(e.slope, g.dim());
    EXPECT_GE(e.r2, 0.0);
    EXPECT_LE(e.r2, 1.0);
  }
}

TEST(Estimate, ProductsAdd) {
  const GridSet a = cantor_grid(1, 3, {{0, 2}}, 7);
  const GridSet b = cantor_grid(1, 3, {{0, 1}}, 7);
  const GridSet ab = cantor_grid(2, 3, {{0, 2}, {0, 1}}, 7);
  const double da = estimate_dimension(a).slope, db = estimate_dimension(b).slope;
  EXPECT_NEAR(estimate_dimension(ab).slope, da + db, 0.1);
  for (int l = 0; l <= ab.level(); ++l) EXPECT_EQ(box_count(ab, l), box_count(a, l) * box_count(b, l));
}

TEST(Patterns, ClosestBase3) {
  const auto p = closest_base3_patterns(2, 1.5, 1.0);
  ASSERT_EQ(p.size(), 2u);
  const double d = pattern_dimension(3, p);
  EXPECT_GT(d, 1.0);
  EXPECT_NEAR(d, 1.0 + std::log(2.0) / std::log(3.0), 1e-12);
}

TEST(SharpExample, ContainmentIsExact) {
  const SharpHyperplaneExample ex = sharp_hyperplane_example(4, 1.5, 4, 200, 11);
  EXPECT_EQ(ex.ceil_s, 2);
  EXPECT_EQ(ex.t, 1);
  EXPECT_EQ(ex.family.flats.size(), 200u);
  Matrix pts(ex.points.size(), 4);
  for (std::size_t i = 0; i < ex.points.size(); ++i) pts.row(i) = ex.points[i].transpose();
  for (const auto& w : ex.family.flats) {
    const Matrix resid = pts - (pts * w.direction().projector());
    EXPECT_LE(resid.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(w.offset().norm(), 1e-15);
  }
  for (std::size_t i = 0; i < ex.set.size(); ++i) {
    EXPECT_EQ(ex.set.cell(i)[2], 0u);
    EXPECT_EQ(ex.set.cell(i)[3], 0u);
  }
  EXPECT_THROW(sharp_hyperplane_example(2, 1.5, 4), ParameterError);
  EXPECT_THROW(sharp_hyperplane_example(4, 1.0, 4), ParameterError);
  EXPECT_THROW(sharp_hyperplane_example(4, 3.5, 4), ParameterError);
}

TEST(SlicingProduct, DimensionAndFullCube) {
  const double s = std::log(2.0) / std::log(3.0);
  const SlicingProductExample ex = slicing_product_example(2, 1, s, 7);
  EXPECT_NEAR(ex.s_achieved, s, 1e-12);
  EXPECT_NEAR(ex.expected_dimension, 1.0 + s, 1e-12);
  EXPECT_NEAR(estimate_dimension(ex.set).slope, ex.expected_dimension, 0.1);
  const SlicingProductExample full = slicing_product_example(3, 2, 2.0, 4);
  EXPECT_EQ(full.set.size(), std::size_t{1} << (3 * full.set.level()));
  EXPECT_THROW(slicing_product_example(3, 3, 1.0, 4), ParameterError);
  EXPECT_THROW(slicing_product_example(3, 1, 1.5, 4), ParameterError);
}

TEST(FlatSlice, AxisSliceRecoversFactor) {
  const double s = std::log(2.0) / std::log(3.0);
  const SlicingProductExample ex = slicing_product_example(2, 1, s, 6);
  const GridSet factor = cantor_grid(1, 3, {{0, 2}}, 6);
  const int level = ex.set.level();
  const double side = std::ldexp(1.0, -level);
  const AffineFlat row(Subspace::coordinate(2, {0}), Eigen::Vector2d(0.0, (37 + 0.5) * side));
  const GridSet slice = flat_slice(ex.set, row, side);
  const int shift = flat_slice_level_shift(2);
  EXPECT_EQ(slice.level(), level + shift);
  for (int l = 0; l <= level; ++l) EXPECT_EQ(box_count(slice, l + shift), box_count(factor, l)) << l;
}

TEST(FlatSlice, MissAndMonotone) {
  const GridSet g = cantor_grid(2, 3, {{0, 2}, {0, 1, 2}}, 5);
  const AffineFlat away(Subspace::coordinate(2, {0}), Eigen::Vector2d(0.0, 5.0));
  EXPECT_TRUE(flat_slice(g, away, 0.1).empty());
  const AffineFlat diag(haar_sample(2, 1, Seed{4}), Eigen::Vector2d(0.5, 0.5));
  std::size_t prev = 0;
  for (double rho : {0.01, 0.02, 0.05, 0.1, 0.3}) {
    const std::size_t c = flat_slice(g, diag, rho).size();
    EXPECT_GE(c, prev);
    prev = c;
  }
  EXPECT_THROW(flat_slice(g, diag, 1e-6), ParameterError);
}

TEST(FlatSlice, SpreadSlicesOfProduct) {
  // Every non-vertical line meets Cantor x [0,1] in an affine copy of a
  // piece of the Cantor factor, so some translate slices with dimension ~ s.
  const double s = std::log(2.0) / std::log(3.0);
  const SlicingProductExample ex = slicing_product_example(2, 1, s, 7);
  const int level = ex.set.level();
  const int shift = flat_slice_level_shift(2);
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Subspace u = haar_sample(2, 1, rng);
    const Vector normal = u.complement().basis().col(0);
    double best = 0.0;
    for (int j = 0; j <= 8; ++j) {
      const AffineFlat w(u, Eigen::Vector2d(0.5, 0.5) + normal * (0.1 * (j - 4)));
      const GridSet slice = flat_slice(ex.set, w, std::ldexp(1.0, -level));
      if (slice.size() < 8) continue;
      best = std::max(best, estimate_dimension(slice, shift + 3, level + shift - 1).slope);
    }
    EXPECT_GE(best, ex.s_achieved - 0.15) << trial;
  }
}

TEST(FamilyDimension, Examples) {
  const Subspace u = haar_sample(3, 1, Seed{1});
  EXPECT_NEAR(family_dimension(std::vector<Subspace>(5, u), 2, 6).slope, 0.0, 1e-12);

  Rng rng(2);
  std::uniform_real_distribution<double> unif(0.0, std::numbers::pi);
  std::vector<Subspace> circle;
  for (int i = 0; i < 1000; ++i) {
    const double th = unif(rng);
    Matrix b(2, 1);
    b << std::cos(th), std::sin(th);
    circle.push_back(Subspace::from_orthonormal(b));
  }
  EXPECT_NEAR(family_dimension(circle, 2, 7).slope, 1.0, 0.15);

  std::vector<AffineFlat> lines;
  std::uniform_real_distribution<double> b01(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) lines.emplace_back(Subspace::coordinate(2, {0}), Eigen::Vector2d(0.0, b01(rng)));
  EXPECT_NEAR(family_dimension(lines, 2, 7).slope, 1.0, 0.15);

  std::vector<FlatLike> mixed{Subspace::coordinate(2, {0}), lines.front()};
  EXPECT_THROW(family_dimension(mixed, 2, 4), ParameterError);
  EXPECT_THROW(family_dimension(std::vector<Subspace>{}, 2, 4), ParameterError);
}

TEST(FamilyDimension, NormEquivalence) {
  Rng rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 5, k = 1 + trial % (n - 1);
    const Subspace a = haar_sample(n, k, rng), b = haar_sample(n, k, rng);
    const double maxentry = (a.projector() - b.projector()).cwiseAbs().maxCoeff();
    const double dg = grass_distance(a, b);
    EXPECT_LE(maxentry, dg + 1e-12);
    EXPECT_LE(dg, n * maxentry + 1e-12);
  }
}

TEST(Serialization, CsvRoundTrip) {
  const GridSet g = cantor_grid(2, 3, {{0, 2}}, 4);
  std::stringstream ss;
  write_csv(g, ss);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "c0,c1");
  EXPECT_EQ(read_csv(ss, g.level()), g);
}

TEST(Serialization, BinaryRoundTrip) {
  for (const GridSet& g : {cantor_grid(2, 3, {{0, 2}}, 5), GridSet::full_cube(3, 4), GridSet(2, 3),
                           cantor_grid(1, 3, {{0, 2}}, 12)}) {
    std::stringstream ss;
    write_binary(g, ss);
    EXPECT_EQ(read_binary(ss), g);
  }
  std::stringstream bad("NOPE");
  EXPECT_THROW(read_binary(bad), ParameterError);
}

TEST(Serialization, BinaryIsCompactForRuns) {
  std::stringstream ss;
  write_binary(GridSet::full_cube(2, 10), ss);
  EXPECT_LT(ss.str().size(), 64u);
}

TEST(Serialization, EstimateJson) {
  const auto j = to_json(estimate_dimension(GridSet::full_cube(1, 4), 1, 4));
  EXPECT_NEAR(j["slope"].get<double>(), 1.0, 1e-12);
  EXPECT_EQ(j["counts"].size(), 4u);
}
