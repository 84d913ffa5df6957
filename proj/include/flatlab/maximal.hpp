#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "flatlab/common.hpp"
#include "flatlab/grassmann.hpp"

namespace flatlab {

/// Nonnegative values on the dyadic cells of side 2^-level covering
/// [-1,1]^n (2^(level+1) cells per axis). Outside the cube the field is 0.
class MaximalField {
 public:
  static constexpr int kMaxDim = 4;
  static constexpr std::size_t kMaxCells = std::size_t{1} << 24;

  /// values are indexed with the last axis varying fastest.
  MaximalField(int n, int level, std::vector<double> values);
  static MaximalField constant(int n, int level, double value);
  /// Value of `f` at each cell center.
  static MaximalField from_function(int n, int level, const std::function<double(const Vector&)>& f);
  /// Indicator of the closed ball B(center, radius), tested at cell centers.
  static MaximalField ball_indicator(int n, int level, double radius, const Vector& center);

  int dim() const { return n_; }
  int level() const { return level_; }
  double cell_side() const;
  int cells_per_axis() const { return side_; }
  const std::vector<double>& values() const { return values_; }
  double sup() const { return sup_; }

  /// Center of the cell with integer coordinates `idx` (any integers).
  Vector center(const std::vector<long>& idx) const;

  /// The field translated by shift * cell_side(); vacated cells are 0.
  MaximalField shifted(const std::vector<int>& shift) const;

  /// Sum of values over last-axis indices [lo, hi] of the line through
  /// `prefix_idx` (the first n-1 cell coordinates). Out-of-range cells add 0.
  double line_sum(const std::vector<long>& prefix_idx, long lo, long hi) const;

  /// Whether some nonzero cell has index within [lo_i, hi_i] on every axis.
  bool support_meets(const std::vector<long>& lo, const std::vector<long>& hi) const;

 private:
  int n_;
  int level_;
  int side_;
  std::vector<double> values_;
  std::vector<double> prefix_;  // per line, side_ + 1 partial sums
  double sup_ = 0.0;
  std::vector<long> support_lo_;
  std::vector<long> support_hi_;
};

/// delta-neighborhood of (U + a) intersected with B(a, 1/2).
struct TubeSpec {
  Subspace direction;
  Vector center;
  double radius = 0.0;
};

/// Distance from x to the disc piece (U + a) cap B(a, 1/2).
double tube_distance(const TubeSpec& t, const Vector& x);

/// Mean of f over the cells whose centers lie in the tube, divided by the
/// number of such cells. Requires cell side <= radius / 4.
double tube_average(const MaximalField& f, const TubeSpec& t);

/// Largest tube average over translates center + a, a in U^perp on a grid of
/// spacing search_step with |a| <= 2. Requires search_step <= delta / 2.
double kakeya_maximal(const MaximalField& f, const Subspace& u, double delta, double search_step);
double kakeya_maximal(const MaximalField& f, const Subspace& u, double delta, double search_step,
                      const Vector& center);

/// (mean over ndirs Haar k-subspaces of M^p)^(1/p), search step delta/2.
double maximal_lp_norm(const MaximalField& f, int k, double delta, double p, int ndirs, Seed seed);

struct ScalingRow {
  double delta = 0.0;
  int level = 0;
  double norm = 0.0;
};

/// Union of `ntubes` random delta-tubes in the plane (directions uniform,
/// centers in [-1/2,1/2]^2), rebuilt for each delta; reports the L^p norm of
/// the line maximal function over `ndirs` directions.
std::vector<ScalingRow> maximal_scaling(int ntubes, double p, const std::vector<double>& deltas, int ndirs,
                                        Seed seed);

void write_scaling_csv(const std::vector<ScalingRow>& rows, std::ostream& out);
/// Matplotlib script that plots the CSV named `csv_name` on log-log axes.
void write_scaling_plot_script(const std::string& csv_name, std::ostream& out);

}  // namespace flatlab
