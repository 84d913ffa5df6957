#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "flatlab/maximal.hpp"

using namespace flatlab;

namespace {

double disc_distance(const Subspace& u, const Vector& a, const Vector& x) {
  const Vector v = x - a;
  const Vector p = u.project(v);
  const double r = p.norm();
  return r <= 0.5 ? (v - p).norm() : (v - p * (0.5 / r)).norm();
}

// Every cell center of the grid extended to [-3,3]^n, value 0 off [-1,1]^n.
double tube_average_oracle(const MaximalField& f, const TubeSpec& t) {
  const int n = f.dim(), side = f.cells_per_axis();
  const double h = f.cell_side();
  std::vector<long> idx(n, -side);
  double sum = 0.0;
  long count = 0;
  while (true) {
    Vector c(n);
    for (int i = 0; i < n; ++i) c(i) = -1.0 + (idx[i] + 0.5) * h;
    if (disc_distance(t.direction, t.center, c) <= t.radius) {
      ++count;
      bool inside = true;
      std::size_t lin = 0;
      for (int i = 0; i < n; ++i) {
        inside = inside && idx[i] >= 0 && idx[i] < side;
        lin = lin * side + static_cast<std::size_t>(std::max(0L, idx[i]));
      }
      if (inside) sum += f.values()[lin];
    }
    int j = n - 1;
    while (j >= 0 && ++idx[j] == 2L * side) idx[j--] = -side;
    if (j < 0) break;
  }
  return count ? sum / count : 0.0;
}

Vector vec2(double x, double y) { return Eigen::Vector2d(x, y); }

}  // namespace

TEST(Field, ConstructionChecks) {
  EXPECT_THROW(MaximalField(2, 3, std::vector<double>(10, 1.0)), ParameterError);
  EXPECT_THROW(MaximalField(2, 2, std::vector<double>(64, -1.0)), ParameterError);
  EXPECT_THROW(MaximalField::constant(5, 2, 1.0), ParameterError);
  EXPECT_THROW(MaximalField::constant(3, 8, 1.0), ParameterError);
  const MaximalField f = MaximalField::constant(2, 3, 2.0);
  EXPECT_EQ(f.cells_per_axis(), 16);
  EXPECT_DOUBLE_EQ(f.cell_side(), 0.125);
  EXPECT_DOUBLE_EQ(f.sup(), 2.0);
  EXPECT_DOUBLE_EQ(f.line_sum({3}, -5, 20), 32.0);
  EXPECT_DOUBLE_EQ(f.line_sum({3}, 2, 4), 6.0);
}

TEST(Field, ShiftMovesValues) {
  const MaximalField f = MaximalField::ball_indicator(2, 4, 0.3, vec2(0.0, 0.0));
  const MaximalField g = f.shifted({2, -1});
  const int side = f.cells_per_axis();
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) {
      const int si = i - 2, sj = j + 1;
      const double expect = si >= 0 && si < side && sj >= 0 && sj < side ? f.values()[si * side + sj] : 0.0;
      EXPECT_EQ(g.values()[i * side + j], expect);
    }
}

TEST(TubeAverage, ConstantAndBall) {
  const MaximalField one = MaximalField::constant(2, 7, 1.0);
  const MaximalField ball = MaximalField::ball_indicator(2, 7, 1.0, Vector::Zero(2));
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Subspace u = haar_sample(2, 1, rng);
    EXPECT_NEAR(tube_average(one, {u, vec2(0.1, -0.2), 0.05}), 1.0, 1e-12);
    EXPECT_NEAR(tube_average(ball, {u, Vector::Zero(2), 0.05}), 1.0, 1e-12);
  }
}

TEST(TubeAverage, HalfSpace) {
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Subspace u = haar_sample(3, 1, rng);
    const Vector a = random_unit_vector(3, rng) * 0.2;
    const Vector nu = u.complement().basis().col(0);
    const MaximalField half =
        MaximalField::from_function(3, 5, [&](const Vector& x) { return nu.dot(x - a) >= 0 ? 1.0 : 0.0; });
    EXPECT_NEAR(tube_average(half, {u, a, 0.125}), 0.5, 0.1);
  }
}

TEST(TubeAverage, MatchesBruteForce) {
  Rng rng(3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int n : {2, 3}) {
    const int level = n == 2 ? 5 : 3;
    std::vector<double> values(std::size_t{1} << (n * (level + 1)));
    for (auto& v : values) v = unif(rng) < 0.3 ? unif(rng) : 0.0;
    const MaximalField f(n, level, values);
    for (int trial = 0; trial < 20; ++trial) {
      const int k = 1 + trial % (n - 1);
      const Subspace u = haar_sample(n, k, rng);
      const Vector a = random_unit_vector(n, rng) * (1.5 * unif(rng));
      const double delta = (n == 2 ? 0.15 : 0.5) * (0.5 + unif(rng)) / 1.5;
      const TubeSpec t{u, a, std::min(0.5, std::max(delta, 4 * f.cell_side()))};
      EXPECT_NEAR(tube_average(f, t), tube_average_oracle(f, t), 1e-12) << n << " " << trial;
    }
  }
}

TEST(TubeAverage, Errors) {
  const MaximalField f = MaximalField::constant(2, 4, 1.0);
  const Subspace u = Subspace::coordinate(2, {0});
  EXPECT_THROW(tube_average(f, {u, Vector::Zero(2), 0.1}), ParameterError);  // side 1/16 > 0.1/4
  EXPECT_THROW(tube_average(f, {u, Vector::Zero(2), 0.6}), ParameterError);
}

TEST(Maximal, TrivialFields) {
  const Subspace u = haar_sample(2, 1, Seed{4});
  EXPECT_NEAR(kakeya_maximal(MaximalField::constant(2, 6, 1.0), u, 0.1, 0.05), 1.0, 1e-12);
  EXPECT_EQ(kakeya_maximal(MaximalField::constant(2, 6, 0.0), u, 0.1, 0.05), 0.0);
  EXPECT_THROW(kakeya_maximal(MaximalField::constant(2, 6, 1.0), u, 0.1, 0.06), ParameterError);
}

TEST(Maximal, BallIndicatorIsOne) {
  const MaximalField ball = MaximalField::ball_indicator(2, 7, 1.0, Vector::Zero(2));
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial)
    EXPECT_NEAR(kakeya_maximal(ball, haar_sample(2, 1, rng), 0.05, 0.025), 1.0, 1e-12);
}

TEST(Maximal, BoundedBySupAndMonotone) {
  Rng rng(6);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> vf(std::size_t{1} << 12), vg(vf.size());
  for (std::size_t i = 0; i < vf.size(); ++i) {
    vf[i] = unif(rng) < 0.2 ? unif(rng) : 0.0;
    vg[i] = vf[i] + (unif(rng) < 0.5 ? unif(rng) : 0.0);
  }
  const MaximalField f(2, 5, vf), g(2, 5, vg);
  for (int trial = 0; trial < 10; ++trial) {
    const Subspace u = haar_sample(2, 1, rng);
    const double mf = kakeya_maximal(f, u, 0.125, 0.0625), mg = kakeya_maximal(g, u, 0.125, 0.0625);
    EXPECT_GE(mf, 0.0);
    EXPECT_LE(mf, f.sup() + 1e-12);
    EXPECT_LE(mf, mg + 1e-12);
  }
}

TEST(Maximal, TranslationCovariance) {
  const int level = 6;
  const MaximalField f = MaximalField::from_function(
      2, level, [](const Vector& x) { return std::exp(-8.0 * (x - Eigen::Vector2d(0.1, -0.1)).squaredNorm()) *
                                             (x.norm() < 0.6); });
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const std::vector<int> shift{static_cast<int>(rng() % 9) - 4, static_cast<int>(rng() % 9) - 4};
    const Vector v = vec2(shift[0], shift[1]) * f.cell_side();
    const Subspace u = haar_sample(2, 1, rng);
    const double base = kakeya_maximal(f, u, 0.1, 0.05);
    const double moved = kakeya_maximal(f.shifted(shift), u, 0.1, 0.05, v);
    EXPECT_NEAR(moved, base, std::ldexp(1.0, -level + 2));
  }
}

TEST(Maximal, RotationCovariance) {
  const Vector c = vec2(0.2, 0.1);
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix rot = haar_sample(2, 2, rng).basis();
    const MaximalField f = MaximalField::ball_indicator(2, 6, 0.35, c);
    const MaximalField g = MaximalField::ball_indicator(2, 6, 0.35, rot * c);
    const Subspace u = haar_sample(2, 1, rng);
    const Subspace ru = Subspace::span(rot * u.basis());
    EXPECT_NEAR(kakeya_maximal(f, u, 0.1, 0.025), kakeya_maximal(g, ru, 0.1, 0.025), 0.05) << trial;
  }
}

TEST(Maximal, RefinementStability) {
  const MaximalField coarse = MaximalField::ball_indicator(2, 5, 1.0, Vector::Zero(2));
  const MaximalField fine = MaximalField::ball_indicator(2, 6, 1.0, Vector::Zero(2));
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Subspace u = haar_sample(2, 1, rng);
    const TubeSpec t{u, random_unit_vector(2, rng) * (0.5 + 0.05 * trial), 0.125};
    const double a = tube_average(coarse, t), b = tube_average(fine, t);
    EXPECT_LE(std::abs(a - b), 0.1 * std::max(a, b) + 1e-12) << trial;
  }
}

TEST(LpNorm, BallAndSup) {
  const MaximalField ball = MaximalField::ball_indicator(2, 7, 1.0, Vector::Zero(2));
  for (double p : {1.0, 2.0, 3.5}) EXPECT_NEAR(maximal_lp_norm(ball, 1, 0.05, p, 4, 1), 1.0, 1e-12);
  const MaximalField small = MaximalField::ball_indicator(2, 5, 0.2, vec2(0.3, 0.3));
  const double v = maximal_lp_norm(small, 1, 0.125, 2.0, 6, 2);
  EXPECT_GT(v, 0.0);
  EXPECT_LE(v, small.sup());
  EXPECT_EQ(v, maximal_lp_norm(small, 1, 0.125, 2.0, 6, 2));
  EXPECT_THROW(maximal_lp_norm(small, 1, 0.125, 0.5, 6, 2), ParameterError);
}

TEST(Scaling, TableShape) {
  const auto rows = maximal_scaling(10, 2.0, {1.0 / 16, 1.0 / 32}, 4, 3);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].level, 6);
  EXPECT_EQ(rows[1].level, 7);
  for (const auto& r : rows) {
    EXPECT_GT(r.norm, 0.0);
    EXPECT_LE(r.norm, 1.0 + 1e-12);
  }
  std::stringstream csv, script;
  write_scaling_csv(rows, csv);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "delta,level,norm");
  write_scaling_plot_script("scaling.csv", script);
  EXPECT_NE(script.str().find("scaling.csv"), std::string::npos);
}
