#include "flatlab/duality.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "flatlab/parallel.hpp"

namespace flatlab {

namespace {

std::vector<std::vector<double>> read_numeric_csv(std::istream& in, std::size_t& columns) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "CSV is missing its header");
  columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream row(line);
    std::string field;
    std::vector<double> values;
    while (std::getline(row, field, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(field, &used));
      } catch (const std::exception&) {
        throw ParameterError("bad CSV field '" + field + "'");
      }
    }
    require(values.size() == columns, "CSV row has the wrong number of fields");
    rows.push_back(std::move(values));
  }
  return rows;
}

Vector unit_normal(const AffineFlat& w) {
  require(w.dim() == w.ambient_dim() - 1, "expected a hyperplane");
  return w.direction().complement().basis().col(0);
}

}  // namespace

// ---------------------------------------------------------------------------
// Point-hyperplane duality

AffineFlat GraphHyperplane::to_flat() const {
  const int n = ambient_dim();
  require(n >= 2, "graph hyperplanes need n >= 2");
  Vector normal(n);
  normal.head(n - 1) = -a;
  normal(n - 1) = 1.0;
  Vector point = Vector::Zero(n);
  point(n - 1) = c;
  const Subspace line = Subspace::span(normal);
  return {line.complement(), point};
}

GraphHyperplane GraphHyperplane::from_flat(const AffineFlat& w) {
  const int n = w.ambient_dim();
  require(n >= 2 && w.dim() == n - 1, "from_flat expects a hyperplane");
  const Vector nu = unit_normal(w);
  if (std::abs(nu(n - 1)) <= tol::kIdentity) throw VerticalHyperplaneError("hyperplane is vertical");
  GraphHyperplane g;
  g.a = -nu.head(n - 1) / nu(n - 1);
  g.c = nu.dot(w.offset()) / nu(n - 1);
  return g;
}

GraphHyperplane dualize_point(const Vector& x) {
  require(x.size() >= 2, "dualize_point needs n >= 2");
  const auto n = x.size();
  return {x.head(n - 1), x(n - 1)};
}

Vector dualize_hyperplane(const GraphHyperplane& l) {
  const int n = l.ambient_dim();
  Vector x(n);
  x.head(n - 1) = -l.a;
  x(n - 1) = l.c;
  return x;
}

bool incident(const Vector& x, const GraphHyperplane& l, double tol) {
  require(tol > 0, "incidence tolerance must be positive");
  require(x.size() == l.ambient_dim(), "dimension mismatch");
  const auto n = x.size();
  return std::abs(x(n - 1) - l.a.dot(x.head(n - 1)) - l.c) <= tol;
}

// ---------------------------------------------------------------------------
// Projective maps

ProjectiveMap::ProjectiveMap(Matrix m, Matrix inv) : matrix_(std::move(m)), inverse_(std::move(inv)) {
  const auto n = matrix_.rows() - 1;
  normal_ = matrix_.row(n).head(n).transpose();
  offset_ = -matrix_(n, n);
  const double norm = normal_.norm();
  if (norm > 0) {
    normal_ /= norm;
    offset_ /= norm;
  } else {
    offset_ = 0.0;
  }
}

ProjectiveMap ProjectiveMap::from_matrix(Matrix m) {
  require(m.rows() == m.cols() && m.rows() >= 2, "projective matrix must be square, at least 2x2");
  Eigen::FullPivLU<Matrix> lu(m);
  require(std::abs(lu.determinant()) >= 1e-9, "projective matrix is singular");
  Matrix inv = lu.inverse();
  return {std::move(m), std::move(inv)};
}

ProjectiveMap ProjectiveMap::identity(int n) {
  require(n >= 1, "dimension must be positive");
  return from_matrix(Matrix::Identity(n + 1, n + 1));
}

Vector ProjectiveMap::apply_homogeneous(const Vector& x) const {
  const int n = ambient_dim();
  require(x.size() == n, "point dimension mismatch");
  Vector h(n + 1);
  h.head(n) = x;
  h(n) = 1.0;
  return matrix_ * h;
}

Vector ProjectiveMap::apply(const Vector& x) const {
  const Vector y = apply_homogeneous(x);
  const int n = ambient_dim();
  if (std::abs(y(n)) <= tol::kAtInfinity) throw MapsToInfinityError("point maps to infinity");
  return y.head(n) / y(n);
}

Vector ProjectiveMap::apply_inverse(const Vector& y) const {
  const int n = ambient_dim();
  require(y.size() == n, "point dimension mismatch");
  Vector h(n + 1);
  h.head(n) = y;
  h(n) = 1.0;
  const Vector x = inverse_ * h;
  if (std::abs(x(n)) <= tol::kAtInfinity) throw MapsToInfinityError("point maps to infinity");
  return x.head(n) / x(n);
}

ProjectiveMap ProjectiveMap::inverse() const { return {inverse_, matrix_}; }

ProjectiveMap projective_to_infinity(const Vector& u, double h) {
  const auto n = u.size();
  require(n >= 1, "dimension must be positive");
  require(std::abs(u.norm() - 1.0) <= tol::kIdentity, "u must be a unit vector");
  require(std::isfinite(h), "h must be finite");

  Matrix rot = Matrix::Identity(n, n);
  Vector v = u;
  v(n - 1) -= 1.0;
  if (v.norm() > tol::kIdentity) rot -= 2.0 * v * v.transpose() / v.squaredNorm();

  Matrix lift = Matrix::Identity(n + 1, n + 1);
  lift.topLeftCorner(n, n) = rot;
  Matrix shift = Matrix::Identity(n + 1, n + 1);
  shift(n - 1, n) = -h;
  Matrix swap = Matrix::Identity(n + 1, n + 1);
  swap.row(n - 1).swap(swap.row(n));
  return ProjectiveMap::from_matrix(swap * shift * lift);
}

Vector apply_projective(const ProjectiveMap& m, const Vector& x) { return m.apply(x); }

AffineFlat apply_projective(const ProjectiveMap& m, const AffineFlat& w, double* residual) {
  const int n = m.ambient_dim();
  require(w.ambient_dim() == n, "flat dimension mismatch");
  const int k = w.dim();
  const Matrix& basis = w.direction().basis();
  const Vector& nu = m.exceptional_normal();

  // lambda is the homogeneous coordinate along W, up to a positive factor.
  auto lambda = [&](const Vector& x) { return nu.norm() > 0 ? nu.dot(x) - m.exceptional_offset() : 1.0; };
  const Vector slope = k > 0 ? Vector(basis.transpose() * nu) : Vector::Zero(0);
  Vector p0 = w.offset();
  if (std::abs(lambda(p0)) < 0.5 && slope.size() > 0 && slope.norm() > 1e-3) {
    const double target = lambda(p0) >= 0 ? 1.0 : -1.0;
    p0 += basis * slope * ((target - lambda(p0)) / slope.squaredNorm());
  }
  if (std::abs(lambda(p0)) <= tol::kAtInfinity)
    throw MapsToInfinityError("flat lies in the exceptional hyperplane");

  const double steepest = slope.size() > 0 ? slope.cwiseAbs().maxCoeff() : 0.0;
  const double sigma = steepest > 0 ? std::min(1.0, std::abs(lambda(p0)) / (2.0 * steepest)) : 1.0;

  const Vector y0 = m.apply(p0);
  if (k == 0) {
    if (residual) *residual = 0.0;
    return {Subspace::from_orthonormal(Matrix(n, 0)), y0};
  }
  Matrix diffs(n, k);
  for (int i = 0; i < k; ++i) diffs.col(i) = m.apply(p0 + sigma * basis.col(i)) - y0;
  const AffineFlat image(Subspace::span(diffs), y0);

  if (residual) {
    double worst = 0.0;
    for (int i = 0; i < k; ++i) {
      worst = std::max(worst, image.distance_to(m.apply(p0 - sigma * basis.col(i))));
      worst = std::max(worst, image.distance_to(m.apply(p0 + 0.5 * sigma * basis.col(i))));
    }
    const Vector diag = basis * Vector::Constant(k, 0.5 * sigma / std::sqrt(static_cast<double>(k)));
    worst = std::max(worst, image.distance_to(m.apply(p0 + diag)));
    *residual = worst;
  }
  return image;
}

Subspace direction_map(const AffineFlat& w) { return w.direction(); }

std::vector<Vector> marstrand_project(const std::vector<Vector>& points, const Subspace& u) {
  std::vector<Vector> out;
  out.reserve(points.size());
  for (const auto& x : points) {
    require(x.size() == u.ambient_dim(), "point dimension mismatch");
    out.emplace_back(u.basis().transpose() * x);
  }
  return out;
}

std::vector<double> marstrand_experiment(const std::vector<Vector>& points, int k, int ndirs, Seed seed,
                                         int l_min, int l_max) {
  require(!points.empty(), "point cloud is empty");
  require(ndirs >= 1, "ndirs must be positive");
  const int n = static_cast<int>(points.front().size());
  std::vector<double> dims(static_cast<std::size_t>(ndirs));
  parallel_for(dims.size(), [&](std::size_t i) {
    const Subspace u = haar_sample(n, k, derive_seed(seed, i));
    dims[i] = point_cloud_dimension(marstrand_project(points, u), l_min, l_max).slope;
  });
  return dims;
}

std::size_t count_incidences(const std::vector<Vector>& points, const std::vector<AffineFlat>& flats,
                             double tol) {
  std::vector<std::size_t> per_flat(flats.size(), 0);
  parallel_for(flats.size(), [&](std::size_t j) {
    const AffineFlat& w = flats[j];
    const bool hyperplane = w.dim() == w.ambient_dim() - 1;
    const Vector nu = hyperplane ? unit_normal(w) : Vector();
    const double level = hyperplane ? nu.dot(w.offset()) : 0.0;
    std::size_t hits = 0;
    for (const auto& x : points) {
      const double d = hyperplane ? std::abs(nu.dot(x) - level) : w.distance_to(x);
      if (d <= tol) ++hits;
    }
    per_flat[j] = hits;
  });
  return std::accumulate(per_flat.begin(), per_flat.end(), std::size_t{0});
}

std::size_t count_mapped_incidences(const ProjectiveMap& m, const std::vector<Vector>& points,
                                    const std::vector<AffineFlat>& flats, const std::vector<Vector>& mapped_points,
                                    const std::vector<AffineFlat>& mapped_flats, double tol) {
  require(points.size() == mapped_points.size() && flats.size() == mapped_flats.size(),
          "mapped lists must match the originals");
  const int n = m.ambient_dim();
  std::vector<double> lambda(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) lambda[i] = std::abs(m.apply_homogeneous(points[i])(n));

  std::vector<std::size_t> per_flat(flats.size(), 0);
  parallel_for(flats.size(), [&](std::size_t j) {
    const AffineFlat& w = mapped_flats[j];
    const bool hyperplane = w.dim() == n - 1 && flats[j].dim() == n - 1;
    double scale_head = 1.0;
    Vector nu;
    double level = 0.0;
    if (hyperplane) {
      const Vector nu0 = unit_normal(flats[j]);
      Vector cov(n + 1);
      cov.head(n) = nu0;
      cov(n) = -nu0.dot(flats[j].offset());
      scale_head = (m.inverse_matrix().transpose() * cov).head(n).norm();
      nu = unit_normal(w);
      level = nu.dot(w.offset());
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const Vector& y = mapped_points[i];
      if (hyperplane) {
        if (std::abs(nu.dot(y) - level) <= tol / (lambda[i] * scale_head)) ++hits;
      } else if (w.distance_to(y) <= tol) {
        ++hits;
      }
    }
    per_flat[j] = hits;
  });
  return std::accumulate(per_flat.begin(), per_flat.end(), std::size_t{0});
}

// ---------------------------------------------------------------------------
// Spreadification

SpreadifyResult spreadify(const std::vector<Vector>& f, const std::vector<GraphHyperplane>& p, int l_min,
                          int l_max, Seed seed, int ndirs, double incidence_tol) {
  require(!p.empty(), "hyperplane family is empty");
  require(ndirs >= 1, "ndirs must be positive");
  const int n = p.front().ambient_dim();
  require(n >= 2 && n <= kMaxAmbientDim, "unsupported ambient dimension");
  for (const auto& l : p) require(l.ambient_dim() == n, "hyperplanes have inconsistent dimension");
  for (const auto& x : f) require(x.size() == n, "points have inconsistent dimension");

  SpreadifyResult result;
  SpreadifyReport& rep = result.report;
  rep.seed = seed;

  std::vector<Vector> duals;
  duals.reserve(p.size());
  for (const auto& l : p) duals.push_back(dualize_hyperplane(l));

  rep.candidate_dimensions.assign(static_cast<std::size_t>(ndirs), 0.0);
  parallel_for(rep.candidate_dimensions.size(), [&](std::size_t i) {
    const Subspace v = haar_sample(n, n - 1, derive_seed(seed, i));
    rep.candidate_dimensions[i] = point_cloud_dimension(marstrand_project(duals, v), l_min, l_max).slope;
  });
  std::vector<AffineFlat> before;
  before.reserve(p.size());
  for (const auto& l : p) before.push_back(l.to_flat());
  std::vector<Subspace> dirs_before;
  for (const auto& w : before) dirs_before.push_back(direction_map(w));
  rep.initial = family_dimension(dirs_before, l_min, l_max);

  double radius = 0.0;
  for (const auto& x : duals) radius = std::max(radius, x.norm());
  for (const auto& x : f) radius = std::max(radius, x.norm());
  rep.exceptional_offset = 2.0 * std::max(radius, 1.0);

  // Candidates within kSpreadifyTieTolerance of the best projection dimension
  // are ties. The box-count proxy saturates when the map bunches directions
  // together, so ties go to the candidate whose mapped family keeps the
  // largest direction dimension; lowest index after that.
  const double best = *std::max_element(rep.candidate_dimensions.begin(), rep.candidate_dimensions.end());
  for (int i = 0; i < ndirs; ++i)
    if (rep.candidate_dimensions[i] >= best - kSpreadifyTieTolerance) rep.tied_indices.push_back(i);
  rep.tied_final_dimensions.assign(rep.tied_indices.size(), 0.0);
  std::vector<std::vector<AffineFlat>> images(rep.tied_indices.size());
  std::vector<double> residuals(rep.tied_indices.size(), 0.0);
  parallel_for(rep.tied_indices.size(), [&](std::size_t t) {
    const Subspace v = haar_sample(n, n - 1, derive_seed(seed, static_cast<std::uint64_t>(rep.tied_indices[t])));
    const ProjectiveMap m = projective_to_infinity(v.complement().basis().col(0), rep.exceptional_offset);
    std::vector<Subspace> dirs;
    images[t].reserve(before.size());
    for (const auto& w : before) {
      double res = 0.0;
      images[t].push_back(apply_projective(m, w, &res));
      residuals[t] = std::max(residuals[t], res);
      dirs.push_back(direction_map(images[t].back()));
    }
    rep.tied_final_dimensions[t] = family_dimension(dirs, l_min, l_max).slope;
  });
  const std::size_t pick = static_cast<std::size_t>(
      std::max_element(rep.tied_final_dimensions.begin(), rep.tied_final_dimensions.end()) -
      rep.tied_final_dimensions.begin());
  rep.chosen_index = rep.tied_indices[pick];
  rep.chosen_direction = haar_sample(n, n - 1, derive_seed(seed, static_cast<std::uint64_t>(rep.chosen_index)));
  rep.exceptional_normal = rep.chosen_direction.complement().basis().col(0);
  const ProjectiveMap phi = projective_to_infinity(rep.exceptional_normal, rep.exceptional_offset);

  result.flats = std::move(images[pick]);
  rep.max_refit_residual = residuals[pick];
  result.points.reserve(f.size());
  for (const auto& x : f) result.points.push_back(phi.apply(x));
  std::vector<Subspace> dirs_after;
  for (const auto& w : result.flats) dirs_after.push_back(direction_map(w));
  rep.final = family_dimension(dirs_after, l_min, l_max);

  rep.incidences_before = count_incidences(f, before, incidence_tol);
  rep.incidences_after =
      count_mapped_incidences(phi, f, before, result.points, result.flats, incidence_tol);
  return result;
}

nlohmann::ordered_json to_json(const SpreadifyReport& r) {
  nlohmann::ordered_json j;
  j["seed"] = r.seed;
  j["chosen_index"] = r.chosen_index;
  j["chosen_normal"] = std::vector<double>(r.exceptional_normal.data(),
                                           r.exceptional_normal.data() + r.exceptional_normal.size());
  j["exceptional_offset"] = r.exceptional_offset;
  j["candidate_dimensions"] = r.candidate_dimensions;
  j["tied_indices"] = r.tied_indices;
  j["tied_final_dimensions"] = r.tied_final_dimensions;
  j["initial_direction_dimension"] = to_json(r.initial);
  j["final_direction_dimension"] = to_json(r.final);
  j["incidences_before"] = r.incidences_before;
  j["incidences_after"] = r.incidences_after;
  j["incidences_preserved"] = r.incidences_preserved();
  j["max_refit_residual"] = r.max_refit_residual;
  return j;
}

IncidenceExample horizontal_lines_example(int lines, int points_per_line, Seed seed) {
  require(lines >= 1 && points_per_line >= 0, "bad example size");
  Rng rng(seed);
  std::uniform_real_distribution<double> jitter(0.25, 0.75), unit(0.0, 1.0);
  IncidenceExample ex;
  for (int i = 0; i < lines; ++i) {
    const double b = (i + jitter(rng)) / lines;
    ex.hyperplanes.push_back({Vector::Zero(1), b});
    for (int j = 0; j < points_per_line; ++j) ex.points.push_back(Eigen::Vector2d(unit(rng), b));
  }
  return ex;
}

IncidenceExample sloped_lines_example(int lines, int points_per_line, Seed seed) {
  require(lines >= 1 && points_per_line >= 0, "bad example size");
  Rng rng(seed);
  std::uniform_real_distribution<double> jitter(0.25, 0.75), unit(0.0, 1.0);
  IncidenceExample ex;
  const double quarter = std::atan(1.0);
  for (int i = 0; i < lines; ++i) {
    const double slope = std::tan(-quarter + 2.0 * quarter * (i + jitter(rng)) / lines);
    const double b = unit(rng);
    ex.hyperplanes.push_back({Vector::Constant(1, slope), b});
    for (int j = 0; j < points_per_line; ++j) {
      const double x = unit(rng);
      ex.points.push_back(Eigen::Vector2d(x, slope * x + b));
    }
  }
  return ex;
}

void write_points_csv(const std::vector<Vector>& points, std::ostream& out) {
  require(!points.empty(), "nothing to write");
  const auto n = points.front().size();
  for (Eigen::Index j = 0; j < n; ++j) out << (j ? "," : "") << 'x' << j;
  out << '\n';
  out.precision(17);
  for (const auto& p : points) {
    for (Eigen::Index j = 0; j < n; ++j) out << (j ? "," : "") << p(j);
    out << '\n';
  }
}

std::vector<Vector> read_points_csv(std::istream& in) {
  std::size_t cols = 0;
  std::vector<Vector> out;
  for (const auto& row : read_numeric_csv(in, cols))
    out.push_back(Eigen::Map<const Vector>(row.data(), static_cast<Eigen::Index>(row.size())));
  return out;
}

void write_hyperplanes_csv(const std::vector<GraphHyperplane>& hs, std::ostream& out) {
  require(!hs.empty(), "nothing to write");
  const auto m = hs.front().a.size();
  for (Eigen::Index j = 0; j < m; ++j) out << 'a' << j << ',';
  out << "c\n";
  out.precision(17);
  for (const auto& h : hs) {
    for (Eigen::Index j = 0; j < m; ++j) out << h.a(j) << ',';
    out << h.c << '\n';
  }
}

std::vector<GraphHyperplane> read_hyperplanes_csv(std::istream& in) {
  std::size_t cols = 0;
  auto rows = read_numeric_csv(in, cols);
  require(cols >= 2, "hyperplane CSV needs at least two columns");
  std::vector<GraphHyperplane> out;
  for (const auto& row : rows) {
    GraphHyperplane h;
    h.a = Eigen::Map<const Vector>(row.data(), static_cast<Eigen::Index>(cols - 1));
    h.c = row.back();
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace flatlab
