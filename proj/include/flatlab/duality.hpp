#pragma once

#include <iosfwd>
#include <vector>

#include "json.hpp"
#include "flatlab/common.hpp"
#include "flatlab/dimension.hpp"
#include "flatlab/grassmann.hpp"

namespace flatlab {

/// Non-vertical hyperplane {y_n = <a, y'> + c} where y' = (y_1..y_{n-1}).
struct GraphHyperplane {
  Vector a;
  double c = 0.0;

  int ambient_dim() const { return static_cast<int>(a.size()) + 1; }
  AffineFlat to_flat() const;
  /// Throws VerticalHyperplaneError when the flat has no graph form.
  static GraphHyperplane from_flat(const AffineFlat& w);
};

/// x -> {y_n = <x', y'> + x_n}.
GraphHyperplane dualize_point(const Vector& x);
/// {y_n = <a, y'> + c} -> (-a, c).
Vector dualize_hyperplane(const GraphHyperplane& l);
/// |x_n - <a, x'> - c| <= tol.
bool incident(const Vector& x, const GraphHyperplane& l, double tol);

/// Projective map of R^n acting on homogeneous coordinates [x : 1]. The
/// exceptional hyperplane {<normal, x> = offset} is sent to infinity; a zero
/// normal means there is none.
class ProjectiveMap {
 public:
  /// |det| must be at least 1e-9.
  static ProjectiveMap from_matrix(Matrix m);
  static ProjectiveMap identity(int n);

  int ambient_dim() const { return static_cast<int>(matrix_.rows()) - 1; }
  const Matrix& matrix() const { return matrix_; }
  const Matrix& inverse_matrix() const { return inverse_; }
  const Vector& exceptional_normal() const { return normal_; }
  double exceptional_offset() const { return offset_; }

  /// Throws MapsToInfinityError on the exceptional hyperplane.
  Vector apply(const Vector& x) const;
  Vector apply_inverse(const Vector& y) const;
  /// Homogeneous image of [x : 1].
  Vector apply_homogeneous(const Vector& x) const;

  ProjectiveMap inverse() const;

 private:
  ProjectiveMap(Matrix m, Matrix inv);
  Matrix matrix_;
  Matrix inverse_;
  Vector normal_;
  double offset_ = 0.0;
};

/// Rotates u to e_n (Householder reflection), translates x_n by -h and swaps
/// x_n with the homogeneous coordinate, so {<u,x> = h} goes to infinity.
ProjectiveMap projective_to_infinity(const Vector& u, double h);

Vector apply_projective(const ProjectiveMap& m, const Vector& x);

/// Image of a flat: maps dim+1 affinely independent points of w and refits.
/// `residual`, if given, receives the largest distance from further mapped
/// points of w to the refitted flat.
AffineFlat apply_projective(const ProjectiveMap& m, const AffineFlat& w, double* residual = nullptr);

/// The direction of W, as a point of the Grassmannian.
Subspace direction_map(const AffineFlat& w);

/// Coordinates of the orthogonal projections in the basis of U.
std::vector<Vector> marstrand_project(const std::vector<Vector>& points, const Subspace& u);

/// Box dimension of the projection onto each of `ndirs` Haar k-subspaces.
std::vector<double> marstrand_experiment(const std::vector<Vector>& points, int k, int ndirs, Seed seed,
                                         int l_min, int l_max);

/// Pairs (x, W) with dist(x, W) <= tol.
std::size_t count_incidences(const std::vector<Vector>& points, const std::vector<AffineFlat>& flats,
                             double tol);

/// Incidences between mapped points and mapped flats, judged at the original
/// scale: for a hyperplane with covector w and a point x, the image distance
/// equals dist(x, W) / (|lambda(x)| |(M^-T w)_head|), so the tolerance is
/// scaled by that factor. `mapped_flats` are the refitted images, which is
/// what the count actually tests. Non-hyperplane flats use tol unscaled.
std::size_t count_mapped_incidences(const ProjectiveMap& m, const std::vector<Vector>& points,
                                    const std::vector<AffineFlat>& flats, const std::vector<Vector>& mapped_points,
                                    const std::vector<AffineFlat>& mapped_flats, double tol);

/// Candidate projection dimensions this close to the best are ties.
inline constexpr double kSpreadifyTieTolerance = 0.05;

struct SpreadifyReport {
  Subspace chosen_direction = Subspace::full(1);
  std::vector<double> candidate_dimensions;
  std::vector<int> tied_indices;
  std::vector<double> tied_final_dimensions;
  int chosen_index = 0;
  Vector exceptional_normal;
  double exceptional_offset = 0.0;
  DimensionEstimate initial;
  DimensionEstimate final;
  std::size_t incidences_before = 0;
  std::size_t incidences_after = 0;
  double max_refit_residual = 0.0;
  Seed seed = 0;

  bool incidences_preserved() const { return incidences_before == incidences_after; }
};

struct SpreadifyResult {
  std::vector<Vector> points;
  std::vector<AffineFlat> flats;
  SpreadifyReport report;
};

/// Dualizes P, picks the Haar hyperplane V (out of `ndirs`) on which the dual
/// points project with the largest box dimension, sends the hyperplane normal
/// to V at distance h to infinity and maps F and P. The direction families of
/// P before and after are compared over levels [l_min, l_max]. Near-ties in
/// projection dimension go to the candidate with the larger final estimate.
SpreadifyResult spreadify(const std::vector<Vector>& f, const std::vector<GraphHyperplane>& p, int l_min,
                          int l_max, Seed seed, int ndirs, double incidence_tol = 1e-6);

nlohmann::ordered_json to_json(const SpreadifyReport& r);

struct IncidenceExample {
  std::vector<Vector> points;
  std::vector<GraphHyperplane> hyperplanes;
};

/// Lines {y = b_i} in the plane with stratified intercepts b_i in [0,1]
/// (consecutive gaps >= 1/(2 lines)) and `points_per_line` points of the
/// unit segment over [0,1] on each.
IncidenceExample horizontal_lines_example(int lines, int points_per_line, Seed seed);

/// Lines with stratified slope angles in (-pi/4, pi/4) and intercepts in
/// [0,1], with points of the unit segment over [0,1] on each.
IncidenceExample sloped_lines_example(int lines, int points_per_line, Seed seed);

/// Columns x0..x{n-1}.
void write_points_csv(const std::vector<Vector>& points, std::ostream& out);
std::vector<Vector> read_points_csv(std::istream& in);
/// Columns a0..a{n-2},c.
void write_hyperplanes_csv(const std::vector<GraphHyperplane>& hs, std::ostream& out);
std::vector<GraphHyperplane> read_hyperplanes_csv(std::istream& in);

}  // namespace flatlab
