#pragma once

#include <string>
#include <vector>

#include "flatlab/common.hpp"

namespace flatlab {

/// A linear subspace of R^n stored as an n x k matrix with orthonormal
/// columns. The basis is not unique; comparisons go through projector().
class Subspace {
 public:
  /// Takes ownership of a basis that must already be orthonormal.
  static Subspace from_orthonormal(Matrix basis);
  /// Orthonormalizes the columns of `vectors`; they must be independent.
  static Subspace span(const Matrix& vectors);
  /// span{e_i : i in axes}.
  static Subspace coordinate(int n, const std::vector<int>& axes);
  static Subspace full(int n);

  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  int dim() const { return static_cast<int>(basis_.cols()); }
  const Matrix& basis() const { return basis_; }

  Matrix projector() const { return basis_ * basis_.transpose(); }
  Vector project(const Vector& x) const { return basis_ * (basis_.transpose() * x); }
  /// Orthonormal basis of the orthogonal complement.
  Subspace complement() const;

 private:
  explicit Subspace(Matrix basis) : basis_(std::move(basis)) {}
  Matrix basis_;
};

/// W = U + a with a in U^perp.
class AffineFlat {
 public:
  /// The flat direction + point; the stored offset is the component of
  /// `point` orthogonal to the direction.
  AffineFlat(Subspace direction, const Vector& point);

  const Subspace& direction() const { return direction_; }
  /// Nearest point of the flat to the origin.
  const Vector& offset() const { return offset_; }
  int ambient_dim() const { return direction_.ambient_dim(); }
  int dim() const { return direction_.dim(); }

  AffineFlat translated(const Vector& v) const { return {direction_, offset_ + v}; }
  double distance_to(const Vector& x) const;

 private:
  Subspace direction_;
  Vector offset_;
};

struct Rotation {
  Matrix matrix;
};

/// Largest singular value.
double op_norm(const Matrix& m);

/// Sample from the orthogonally invariant probability measure on G(n,k).
Subspace haar_sample(int n, int k, Rng& rng);
Subspace haar_sample(int n, int k, Seed seed);

/// Uniformly distributed unit vector in R^n.
Vector random_unit_vector(int n, Rng& rng);

/// ||pi_U - pi_V||_op, in [0, 1].
double grass_distance(const Subspace& u, const Subspace& v);

/// grass_distance of the directions plus |a_W - a_W'|.
double affine_distance(const AffineFlat& w1, const AffineFlat& w2);

Vector project_point(const AffineFlat& w, const Vector& x);

/// Direct rotation taking span U onto span V: acts as a plane rotation by
/// each principal angle and as the identity elsewhere.
/// ||I - R||_op = 2 sin(theta_max / 2).
Rotation min_rotation(const Subspace& u, const Subspace& v);

/// A k2-flat contained in W whose nearest point to the origin has norm <= r.
AffineFlat sample_subflat(const AffineFlat& w, int k2, double r, Seed seed);

/// Monte Carlo estimate of the Haar measure of the ball B(U, delta) in G(n,k).
double ball_measure_estimate(const Subspace& u, double delta, int samples, Seed seed);

// ---------------------------------------------------------------------------
// Property suites for the distance lemmas. Each suite reports the largest
// observed ratio lhs / (rhs without constant) so the empirical constant is
// visible next to the asserted one.

struct LemmaCheck {
  std::string name;
  int n = 0;
  int k = 0;
  int samples = 0;
  int violations = 0;
  double max_ratio = 0.0;
  double constant = 0.0;

  bool passed() const { return violations == 0; }
};

/// d_A(U+a, V+a) <= (|a|+1) d_G(U,V) for a in U^perp, |a| <= max_offset.
LemmaCheck check_translation_lemma(int n, int k, int samples, Seed seed, double max_offset = 10.0);

/// |(I - R_{U,V}) b| <= constant * |b| * d_G(U,V) for b in U.
LemmaCheck check_rotation_lemma(int n, int k, int samples, Seed seed, double constant = 2.0);

/// ||I - R_{U,V}||_op <= sqrt(2) d_G(U,V).
LemmaCheck check_min_rotation_norm(int n, int k, int samples, Seed seed);

/// d_A(R X + a, X + a) <= constant * (r + |a| + 1) d_G(U,V) for X a
/// (k-1)-flat in U meeting B(0, r).
LemmaCheck check_subflat_lemma(int n, int k, int samples, Seed seed, double constant = 10.0);

/// Ratio of ball estimates at delta and delta/2 against 2^{k(n-k)} with a
/// relative band of +-`band`. max_ratio holds the measured ratio.
LemmaCheck check_ball_scaling(int n, int k, double delta, int samples, Seed seed, double band = 0.3);

}  // namespace flatlab
