#include "flatlab/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flatlab/parallel.hpp"

namespace flatlab {

namespace {

void check_dims(int n, int k) {
  require(n >= 1 && n <= kMaxAmbientDim, "ambient dimension must be in [1, 16]");
  require(k >= 0 && k <= n, "subspace dimension must be in [0, n]");
}

void check_same_grassmannian(const Subspace& u, const Subspace& v) {
  require(u.ambient_dim() == v.ambient_dim(), "ambient dimension mismatch");
  require(u.dim() == v.dim(), "subspace dimension mismatch");
}

Matrix gaussian_matrix(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

// Random vector in U^perp with norm uniform in [0, max_norm].
Vector random_orthogonal_offset(const Subspace& u, double max_norm, Rng& rng) {
  const int n = u.ambient_dim();
  if (u.dim() == n) return Vector::Zero(n);
  const Subspace perp = u.complement();
  const Vector dir = perp.basis() * random_unit_vector(perp.dim(), rng);
  std::uniform_real_distribution<double> radius(0.0, max_norm);
  return dir * radius(rng);
}

}  // namespace

Subspace Subspace::from_orthonormal(Matrix basis) {
  check_dims(static_cast<int>(basis.rows()), static_cast<int>(basis.cols()));
  const auto k = basis.cols();
  const Matrix gram = basis.transpose() * basis;
  if (k > 0 && (gram - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() > tol::kIdentity)
    throw ParameterError("basis is not orthonormal");
  return Subspace(std::move(basis));
}

Subspace Subspace::span(const Matrix& vectors) {
  const int n = static_cast<int>(vectors.rows());
  const int k = static_cast<int>(vectors.cols());
  check_dims(n, k);
  if (k == 0) return Subspace(Matrix(n, 0));
  Eigen::ColPivHouseholderQR<Matrix> qr(vectors);
  qr.setThreshold(1e-10);
  if (qr.rank() != k) throw ParameterError("spanning vectors are linearly dependent");
  Eigen::HouseholderQR<Matrix> hh(vectors);
  Matrix q = hh.householderQ() * Matrix::Identity(n, k);
  return Subspace(std::move(q));
}

Subspace Subspace::coordinate(int n, const std::vector<int>& axes) {
  check_dims(n, static_cast<int>(axes.size()));
  Matrix basis = Matrix::Zero(n, static_cast<Eigen::Index>(axes.size()));
  for (std::size_t j = 0; j < axes.size(); ++j) {
    require(axes[j] >= 0 && axes[j] < n, "coordinate axis out of range");
    basis(axes[j], static_cast<Eigen::Index>(j)) = 1.0;
  }
  return from_orthonormal(std::move(basis));
}

Subspace Subspace::full(int n) {
  check_dims(n, n);
  return Subspace(Matrix::Identity(n, n));
}

Subspace Subspace::complement() const {
  const int n = ambient_dim();
  const int k = dim();
  if (k == 0) return Subspace(Matrix::Identity(n, n));
  if (k == n) return Subspace(Matrix(n, 0));
  Eigen::HouseholderQR<Matrix> qr(basis_);
  Matrix q = qr.householderQ();
  return Subspace(q.rightCols(n - k));
}

AffineFlat::AffineFlat(Subspace direction, const Vector& point)
    : direction_(std::move(direction)) {
  require(point.size() == direction_.ambient_dim(), "point dimension mismatch");
  offset_ = point - direction_.project(point);
}

double AffineFlat::distance_to(const Vector& x) const {
  return (x - project_point(*this, x)).norm();
}

double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == m.cols() && m.isApprox(m.transpose(), 1e-14)) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

Vector random_unit_vector(int n, Rng& rng) {
  require(n >= 1, "dimension must be positive");
  Vector v;
  do {
    v = gaussian_matrix(n, 1, rng).col(0);
  } while (v.norm() < 1e-12);
  return v.normalized();
}

Subspace haar_sample(int n, int k, Rng& rng) {
  require(n >= 1 && n <= kMaxAmbientDim, "ambient dimension must be in [1, 16]");
  require(k >= 1 && k <= n, "haar_sample requires 1 <= k <= n");
  // Rotational invariance of the Gaussian makes the span Haar distributed.
  const Matrix g = gaussian_matrix(n, k, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, k);
  return Subspace::from_orthonormal(std::move(q));
}

Subspace haar_sample(int n, int k, Seed seed) {
  Rng rng(seed);
  return haar_sample(n, k, rng);
}

double grass_distance(const Subspace& u, const Subspace& v) {
  check_same_grassmannian(u, v);
  const double d = op_norm(u.projector() - v.projector());
  return std::clamp(d, 0.0, 1.0);
}

double affine_distance(const AffineFlat& w1, const AffineFlat& w2) {
  check_same_grassmannian(w1.direction(), w2.direction());
  return grass_distance(w1.direction(), w2.direction()) + (w1.offset() - w2.offset()).norm();
}

Vector project_point(const AffineFlat& w, const Vector& x) {
  require(x.size() == w.ambient_dim(), "point dimension mismatch");
  return w.offset() + w.direction().project(x);
}

Rotation min_rotation(const Subspace& u, const Subspace& v) {
  check_same_grassmannian(u, v);
  const int n = u.ambient_dim();
  Matrix r = Matrix::Identity(n, n);
  if (u.dim() == 0) return {r};

  Eigen::JacobiSVD<Matrix> svd(u.basis().transpose() * v.basis(),
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix pu = u.basis() * svd.matrixU();  // principal vectors in U
  const Matrix pv = v.basis() * svd.matrixV();  // matching principal vectors in V
  const auto& sigma = svd.singularValues();

  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    const double c = std::clamp(sigma(i), 0.0, 1.0);
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    if (s < 1e-12) continue;
    const Vector ui = pu.col(i);
    // Unit vector in U^perp completing the rotation plane of u_i -> v_i.
    const Vector wi = (pv.col(i) - c * ui) / s;
    r += (c - 1.0) * (ui * ui.transpose() + wi * wi.transpose()) +
         s * (wi * ui.transpose() - ui * wi.transpose());
  }
  return {r};
}

AffineFlat sample_subflat(const AffineFlat& w, int k2, double r, Seed seed) {
  const int k = w.dim();
  require(k2 >= 0 && k2 < k, "sample_subflat requires 0 <= k2 < dim(W)");
  require(r > 0.0, "radius must be positive");
  const double slack2 = r * r - w.offset().squaredNorm();
  require(slack2 >= 0.0, "flat does not meet the ball B(0, r)");

  Rng rng(seed);
  std::uniform_real_distribution<double> coord(-r, r);
  const Matrix& basis = w.direction().basis();
  constexpr int kMaxAttempts = 1'000'000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Matrix sub_dir(k, k2);
    if (k2 > 0) sub_dir = haar_sample(k, k2, rng).basis();
    Vector c(k);
    for (int i = 0; i < k; ++i) c(i) = coord(rng);
    AffineFlat x(Subspace::from_orthonormal(basis * sub_dir), w.offset() + basis * c);
    if (x.offset().norm() <= r) return x;
  }
  throw BudgetExceededError("sample_subflat: rejection sampling did not converge");
}

double ball_measure_estimate(const Subspace& u, double delta, int samples, Seed seed) {
  require(delta > 0.0, "delta must be positive");
  require(samples >= 1, "samples must be positive");
  if (delta >= 1.0) return 1.0;

  // Fixed shard layout so the estimate is independent of the thread count.
  constexpr int kShards = 64;
  std::vector<long long> hits(kShards, 0);
  const int n = u.ambient_dim();
  const int k = u.dim();
  const Matrix pu = u.projector();
  parallel_for(kShards, [&](std::size_t shard) {
    Rng rng(derive_seed(seed, shard));
    const int begin = static_cast<int>(static_cast<long long>(samples) * shard / kShards);
    const int end = static_cast<int>(static_cast<long long>(samples) * (shard + 1) / kShards);
    long long count = 0;
    for (int i = begin; i < end; ++i) {
      const Subspace v = haar_sample(n, k, rng);
      if (op_norm(pu - v.projector()) <= delta) ++count;
    }
    hits[shard] = count;
  });
  long long total = 0;
  for (auto h : hits) total += h;
  return static_cast<double>(total) / samples;
}

// ---------------------------------------------------------------------------

LemmaCheck check_translation_lemma(int n, int k, int samples, Seed seed, double max_offset) {
  LemmaCheck out{"translation", n, k, samples, 0, 0.0, 1.0};
  Rng rng(seed);
  for (int i = 0; i < samples; ++i) {
    const Subspace u = haar_sample(n, k, rng);
    const Subspace v = haar_sample(n, k, rng);
    const Vector a = random_orthogonal_offset(u, max_offset, rng);
    const double d = grass_distance(u, v);
    // V + a is re-expressed with offset a - pi_V a by the AffineFlat constructor.
    const double lhs = affine_distance(AffineFlat(u, a), AffineFlat(v, a));
    const double rhs = (a.norm() + 1.0) * d;
    if (lhs > rhs + tol::kInequality) ++out.violations;
    if (rhs > 1e-12) out.max_ratio = std::max(out.max_ratio, lhs / rhs);
  }
  return out;
}

LemmaCheck check_rotation_lemma(int n, int k, int samples, Seed seed, double constant) {
  LemmaCheck out{"rotation", n, k, samples, 0, 0.0, constant};
  Rng rng(seed);
  std::normal_distribution<double> normal;
  for (int i = 0; i < samples; ++i) {
    const Subspace u = haar_sample(n, k, rng);
    const Subspace v = haar_sample(n, k, rng);
    Vector coeffs(k);
    for (int j = 0; j < k; ++j) coeffs(j) = normal(rng);
    const Vector b = u.basis() * coeffs;
    const Matrix r = min_rotation(u, v).matrix;
    const double d = grass_distance(u, v);
    const double lhs = ((Matrix::Identity(n, n) - r) * b).norm();
    const double base = b.norm() * d;
    if (lhs > constant * base + tol::kInequality) ++out.violations;
    if (base > 1e-12) out.max_ratio = std::max(out.max_ratio, lhs / base);
  }
  return out;
}

LemmaCheck check_min_rotation_norm(int n, int k, int samples, Seed seed) {
  LemmaCheck out{"min_rotation_norm", n, k, samples, 0, 0.0, std::sqrt(2.0)};
  Rng rng(seed);
  for (int i = 0; i < samples; ++i) {
    const Subspace u = haar_sample(n, k, rng);
    const Subspace v = haar_sample(n, k, rng);
    const Matrix r = min_rotation(u, v).matrix;
    const double d = grass_distance(u, v);
    const double lhs = op_norm(Matrix::Identity(n, n) - r);
    if (lhs > out.constant * d + tol::kInequality) ++out.violations;
    if (d > 1e-12) out.max_ratio = std::max(out.max_ratio, lhs / d);
  }
  return out;
}

LemmaCheck check_subflat_lemma(int n, int k, int samples, Seed seed, double constant) {
  require(k >= 2, "subflat lemma suite needs k >= 2 so that k' = k-1 >= 1");
  LemmaCheck out{"subflat", n, k, samples, 0, 0.0, constant};
  Rng rng(seed);
  std::uniform_real_distribution<double> radius(0.05, 5.0);
  for (int i = 0; i < samples; ++i) {
    const Subspace u = haar_sample(n, k, rng);
    const Subspace v = haar_sample(n, k, rng);
    const Vector a = random_orthogonal_offset(u, 10.0, rng);
    const double r = radius(rng);
    const AffineFlat x = sample_subflat(AffineFlat(u, Vector::Zero(n)), k - 1, r, rng());
    const Matrix rot = min_rotation(u, v).matrix;

    const AffineFlat rotated(Subspace::from_orthonormal(rot * x.direction().basis()),
                             rot * x.offset() + a);
    const AffineFlat shifted(x.direction(), x.offset() + a);
    const double lhs = affine_distance(rotated, shifted);
    const double base = (r + a.norm() + 1.0) * grass_distance(u, v);
    if (lhs > constant * base + tol::kInequality) ++out.violations;
    if (base > 1e-12) out.max_ratio = std::max(out.max_ratio, lhs / base);
  }
  return out;
}

LemmaCheck check_ball_scaling(int n, int k, double delta, int samples, Seed seed, double band) {
  LemmaCheck out{"ball_scaling", n, k, samples, 0, 0.0, std::ldexp(1.0, k * (n - k))};
  const Subspace u = haar_sample(n, k, derive_seed(seed, 0));
  const double big = ball_measure_estimate(u, delta, samples, derive_seed(seed, 1));
  const double small = ball_measure_estimate(u, delta / 2, samples, derive_seed(seed, 2));
  out.max_ratio = small > 0 ? big / small : std::numeric_limits<double>::infinity();
  if (!(out.max_ratio >= out.constant * (1 - band) && out.max_ratio <= out.constant * (1 + band)))
    out.violations = 1;
  return out;
}

}  // namespace flatlab
