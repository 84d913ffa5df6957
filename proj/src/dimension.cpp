#include "flatlab/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace flatlab {

namespace {

void check_level(int n, int level) {
  require(n >= 1, "grid dimension must be positive");
  require(level >= 0 && level <= 31, "grid level must be in [0, 31]");
}

// Sorts the rows of a flat n-column array lexicographically and drops repeats.
void sort_unique_rows(std::vector<std::uint32_t>& coords, int n, int level) {
  const std::size_t rows = coords.size() / static_cast<std::size_t>(n);
  if (static_cast<long long>(n) * level <= 64) {
    std::vector<std::uint64_t> keys(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      std::uint64_t key = 0;
      for (int j = 0; j < n; ++j) key = level == 0 ? 0 : (key << level) | coords[r * n + j];
      keys[r] = key;
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    coords.resize(keys.size() * n);
    const std::uint64_t mask = level == 64 ? ~0ULL : ((1ULL << level) - 1);
    for (std::size_t r = 0; r < keys.size(); ++r) {
      std::uint64_t key = keys[r];
      for (int j = n - 1; j >= 0; --j) {
        coords[r * n + j] = level == 0 ? 0 : static_cast<std::uint32_t>(key & mask);
        if (level > 0) key >>= level;
      }
    }
    return;
  }
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), 0);
  auto row_less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(coords.begin() + a * n, coords.begin() + (a + 1) * n,
                                        coords.begin() + b * n, coords.begin() + (b + 1) * n);
  };
  auto row_equal = [&](std::size_t a, std::size_t b) {
    return std::equal(coords.begin() + a * n, coords.begin() + (a + 1) * n, coords.begin() + b * n);
  };
  std::sort(order.begin(), order.end(), row_less);
  std::vector<std::uint32_t> out;
  out.reserve(coords.size());
  for (std::size_t i = 0; i < rows; ++i) {
    if (i > 0 && row_equal(order[i], order[i - 1])) continue;
    out.insert(out.end(), coords.begin() + order[i] * n, coords.begin() + (order[i] + 1) * n);
  }
  coords = std::move(out);
}

// Smallest L with 2^L >= base^depth.
int dyadic_level_for(int base, int depth) {
  unsigned __int128 cells = 1;
  for (int i = 0; i < depth; ++i) cells *= static_cast<unsigned>(base);
  int level = 0;
  while ((static_cast<unsigned __int128>(1) << level) < cells) ++level;
  return level;
}

std::vector<DigitPattern> broadcast(int n, const std::vector<DigitPattern>& keep) {
  require(keep.size() == 1 || keep.size() == static_cast<std::size_t>(n),
          "keep must list one pattern or one per axis");
  std::vector<DigitPattern> out = keep.size() == 1 ? std::vector<DigitPattern>(n, keep[0]) : keep;
  return out;
}

void check_pattern(int base, DigitPattern& pattern) {
  require(!pattern.empty(), "digit pattern must be nonempty");
  std::sort(pattern.begin(), pattern.end());
  pattern.erase(std::unique(pattern.begin(), pattern.end()), pattern.end());
  for (int d : pattern) require(d >= 0 && d < base, "digit out of range for base");
}

// Base-b cell indices (at `depth`) whose digits all lie in `pattern`.
std::vector<std::uint64_t> kept_indices(int base, const DigitPattern& pattern, int depth) {
  std::vector<std::uint64_t> indices{0};
  for (int level = 0; level < depth; ++level) {
    std::vector<std::uint64_t> next;
    next.reserve(indices.size() * pattern.size());
    for (auto idx : indices)
      for (int d : pattern) next.push_back(idx * static_cast<std::uint64_t>(base) + d);
    indices = std::move(next);
  }
  return indices;
}

// Dyadic cells at `level` meeting the union of the kept base cells.
std::vector<std::uint32_t> axis_cells(int base, const DigitPattern& pattern, int depth, int level) {
  std::uint64_t base_cells = 1;
  for (int i = 0; i < depth; ++i) base_cells *= static_cast<std::uint64_t>(base);
  const std::uint64_t dyadic = std::uint64_t{1} << level;
  std::vector<std::uint32_t> cells;
  for (auto idx : kept_indices(base, pattern, depth)) {
    // [idx, idx+1) / base^depth intersects dyadic cells lo..hi.
    const std::uint64_t lo = (idx * dyadic) / base_cells;
    const std::uint64_t hi = ((idx + 1) * dyadic + base_cells - 1) / base_cells - 1;
    for (std::uint64_t c = lo; c <= hi; ++c) cells.push_back(static_cast<std::uint32_t>(c));
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

GridSet product_grid(const std::vector<std::vector<std::uint32_t>>& axes, int level) {
  const int n = static_cast<int>(axes.size());
  long double total = 1;
  for (const auto& a : axes) total *= static_cast<long double>(a.size());
  require(total <= static_cast<long double>(GridSet::kMaxCells), "grid exceeds the 2^24 cell cap");
  std::vector<std::uint32_t> coords;
  coords.reserve(static_cast<std::size_t>(total) * n);
  std::vector<std::size_t> odo(n, 0);
  if (total == 0) return GridSet(n, level);
  while (true) {
    for (int j = 0; j < n; ++j) coords.push_back(axes[j][odo[j]]);
    int j = n - 1;
    while (j >= 0 && ++odo[j] == axes[j].size()) odo[j--] = 0;
    if (j < 0) break;
  }
  return GridSet::from_cells(n, level, std::move(coords));
}

double log_ratio(std::size_t count, int base) {
  return std::log(static_cast<double>(count)) / std::log(static_cast<double>(base));
}

}  // namespace

// ---------------------------------------------------------------------------
// GridSet

GridSet::GridSet(int n, int level) : n_(n), level_(level) { check_level(n, level); }

GridSet GridSet::from_cells(int n, int level, std::vector<std::uint32_t> coords) {
  GridSet g(n, level);
  require(coords.size() % static_cast<std::size_t>(n) == 0, "coordinate array is not a multiple of n");
  const std::uint64_t limit = std::uint64_t{1} << level;
  for (auto c : coords) require(c < limit, "cell coordinate out of range for level");
  sort_unique_rows(coords, n, level);
  require(coords.size() / static_cast<std::size_t>(n) <= kMaxCells, "grid exceeds the 2^24 cell cap");
  g.coords_ = std::move(coords);
  return g;
}

GridSet GridSet::full_cube(int n, int level) {
  check_level(n, level);
  std::vector<std::uint32_t> axis(std::size_t{1} << level);
  std::iota(axis.begin(), axis.end(), 0u);
  return product_grid(std::vector<std::vector<std::uint32_t>>(n, axis), level);
}

Vector GridSet::center(std::size_t i) const {
  Vector c(n_);
  const double side = std::ldexp(1.0, -level_);
  const auto row = cell(i);
  for (int j = 0; j < n_; ++j) c(j) = (row[j] + 0.5) * side;
  return c;
}

GridSet GridSet::downsample(int level) const {
  require(level >= 0 && level <= level_, "downsample level must not exceed the grid level");
  if (level == level_) return *this;
  const int shift = level_ - level;
  std::vector<std::uint32_t> coords(coords_.size());
  for (std::size_t i = 0; i < coords_.size(); ++i) coords[i] = coords_[i] >> shift;
  GridSet g(n_, level);
  sort_unique_rows(coords, n_, level);
  g.coords_ = std::move(coords);
  return g;
}

// ---------------------------------------------------------------------------

std::uint64_t box_count(const GridSet& g, int level) {
  require(level >= 0 && level <= g.level(), "box_count level exceeds grid level");
  return g.downsample(level).size();
}

DimensionEstimate estimate_dimension(const GridSet& g, int l_min, int l_max) {
  require(l_min >= 1 && l_min < l_max, "need 1 <= l_min < l_max (at least two levels)");
  require(l_max <= g.level(), "l_max exceeds the grid level");
  require(!g.empty(), "cannot estimate the dimension of an empty set");
  DimensionEstimate e;
  e.level_min = l_min;
  e.level_max = l_max;
  std::vector<double> xs, ys;
  GridSet current = g.downsample(l_max);
  std::vector<std::uint64_t> counts;
  for (int l = l_max; l >= l_min; --l) {
    if (l < l_max) current = current.downsample(l);
    counts.push_back(current.size());
  }
  std::reverse(counts.begin(), counts.end());
  for (int l = l_min; l <= l_max; ++l) {
    xs.push_back(l);
    ys.push_back(std::log2(static_cast<double>(counts[l - l_min])));
  }
  e.counts = counts;
  const double m = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  e.slope = sxy / sxx;
  e.intercept = my - e.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (e.intercept + e.slope * xs[i]);
    ss_res += r * r;
  }
  e.r2 = syy > 0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return e;
}

DimensionEstimate estimate_dimension(const GridSet& g) {
  return estimate_dimension(g, 2, g.level());
}

double pattern_dimension(int base, const std::vector<DigitPattern>& keep) {
  require(base >= 2, "base must be >= 2");
  double d = 0;
  for (auto p : keep) {
    check_pattern(base, p);
    d += log_ratio(p.size(), base);
  }
  return d;
}

GridSet cantor_grid(int n, int base, const std::vector<DigitPattern>& keep, int depth) {
  require(n >= 1, "n must be positive");
  require(base >= 2, "base must be >= 2");
  require(depth >= 0, "depth must be nonnegative");
  require(n * depth * std::log2(static_cast<double>(base)) <= 24.0 + 1e-9,
          "resolution overflow: depth * log2(base) must be <= 24 / n");
  auto patterns = broadcast(n, keep);
  for (auto& p : patterns) check_pattern(base, p);
  const int level = dyadic_level_for(base, depth);
  std::vector<std::vector<std::uint32_t>> axes;
  axes.reserve(n);
  for (const auto& p : patterns) axes.push_back(axis_cells(base, p, depth, level));
  return product_grid(axes, level);
}

std::vector<Vector> cantor_points(int n, int base, const std::vector<DigitPattern>& keep, int depth) {
  require(n >= 1 && base >= 2 && depth >= 0, "invalid Cantor parameters");
  auto patterns = broadcast(n, keep);
  long double total = 1;
  for (auto& p : patterns) {
    check_pattern(base, p);
    total *= std::pow(static_cast<long double>(p.size()), depth);
  }
  require(total <= static_cast<long double>(GridSet::kMaxCells), "too many Cantor points");
  const double scale = std::pow(static_cast<double>(base), -depth);
  std::vector<std::vector<double>> axis_values;
  for (const auto& p : patterns) {
    std::vector<double> vals;
    for (auto idx : kept_indices(base, p, depth)) vals.push_back(static_cast<double>(idx) * scale);
    axis_values.push_back(std::move(vals));
  }
  std::vector<Vector> points;
  points.reserve(static_cast<std::size_t>(total));
  std::vector<std::size_t> odo(n, 0);
  while (true) {
    Vector x(n);
    for (int j = 0; j < n; ++j) x(j) = axis_values[j][odo[j]];
    points.push_back(std::move(x));
    int j = n - 1;
    while (j >= 0 && ++odo[j] == axis_values[j].size()) odo[j--] = 0;
    if (j < 0) break;
  }
  return points;
}

std::vector<DigitPattern> closest_base3_patterns(int axes, double target, double lower) {
  require(axes >= 1, "need at least one axis");
  static const DigitPattern kByCount[] = {{0}, {0, 2}, {0, 1, 2}};
  std::vector<int> best;
  double best_err = std::numeric_limits<double>::infinity();
  // Non-increasing digit counts per axis; the order of axes does not matter.
  std::vector<int> counts(axes, 3);
  while (true) {
    double dim = 0;
    for (int c : counts) dim += log_ratio(static_cast<std::size_t>(c), 3);
    const double err = std::abs(dim - target);
    if (dim > lower + 1e-12 && err < best_err - 1e-12) {
      best_err = err;
      best = counts;
    }
    int j = axes - 1;
    while (j >= 0 && counts[j] == 1) --j;
    if (j < 0) break;
    --counts[j];
    for (int i = j + 1; i < axes; ++i) counts[i] = counts[j];
  }
  require(!best.empty(), "no base-3 pattern reaches the requested dimension range");
  std::vector<DigitPattern> out;
  for (int c : best) out.push_back(kByCount[c - 1]);
  return out;
}

GridSet grid_from_points(const std::vector<Vector>& points, int level) {
  require(!points.empty(), "point cloud is empty");
  const auto d = points.front().size();
  require(d >= 1, "points must have positive dimension");
  Vector lo = points.front(), hi = points.front();
  for (const auto& p : points) {
    require(p.size() == d, "points have inconsistent dimension");
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double range = (hi - lo).maxCoeff();
  const double cells = std::ldexp(1.0, level);
  const auto top = static_cast<std::uint32_t>((std::uint64_t{1} << level) - 1);
  std::vector<std::uint32_t> coords;
  coords.reserve(points.size() * static_cast<std::size_t>(d));
  for (const auto& p : points) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double u = range > 0 ? (p(j) - lo(j)) / range : 0.0;
      const auto c = static_cast<std::uint32_t>(std::clamp(std::floor(u * cells), 0.0, cells - 1));
      coords.push_back(std::min(c, top));
    }
  }
  return GridSet::from_cells(static_cast<int>(d), level, std::move(coords));
}

DimensionEstimate point_cloud_dimension(const std::vector<Vector>& points, int l_min, int l_max) {
  return estimate_dimension(grid_from_points(points, l_max), l_min, l_max);
}

// ---------------------------------------------------------------------------
// Constructions

SharpHyperplaneExample sharp_hyperplane_example(int n, double s, int depth, int family_size,
                                                Seed seed) {
  require(n >= 3, "sharp_hyperplane_example requires n >= 3");
  require(s > 1.0 && s <= n - 1, "sharp_hyperplane_example requires 1 < s <= n-1");
  require(family_size >= 1, "family_size must be positive");
  const int m = static_cast<int>(std::ceil(s - 1e-12));

  SharpHyperplaneExample ex;
  ex.s_target = s;
  ex.ceil_s = m;
  ex.t = n - 1 - m;
  ex.keep = closest_base3_patterns(m, s, static_cast<double>(m - 1));
  ex.s_achieved = pattern_dimension(3, ex.keep);

  // F sits in the coordinate subspace span{e_1..e_m}; remaining axes use cell 0.
  const GridSet low = cantor_grid(m, 3, ex.keep, depth);
  std::vector<std::uint32_t> coords;
  coords.reserve(low.size() * n);
  for (std::size_t i = 0; i < low.size(); ++i) {
    const auto row = low.cell(i);
    coords.insert(coords.end(), row.begin(), row.end());
    coords.insert(coords.end(), static_cast<std::size_t>(n - m), 0u);
  }
  ex.set = GridSet::from_cells(n, low.level(), std::move(coords));
  for (const auto& p : cantor_points(m, 3, ex.keep, depth)) {
    Vector x = Vector::Zero(n);
    x.head(m) = p;
    ex.points.push_back(std::move(x));
  }

  // Hyperplanes through the origin containing span{e_1..e_m}: normal nu in
  // span{e_{m+1}..e_n}. The direction basis is e_1..e_m plus a basis of
  // nu^perp inside the trailing block, so containment is exact.
  Rng rng(seed);
  const int rest = n - m;
  ex.family.note = "hyperplanes containing span{e_1..e_" + std::to_string(m) +
                   "}, parametrized by G(" + std::to_string(rest) + "," + std::to_string(rest - 1) + ")";
  for (int i = 0; i < family_size; ++i) {
    Matrix basis = Matrix::Zero(n, n - 1);
    basis.topLeftCorner(m, m).setIdentity();
    if (rest > 1) {
      const Vector nu = random_unit_vector(rest, rng);
      const Subspace tangent = Subspace::span(nu).complement();
      basis.bottomRightCorner(rest, rest - 1) = tangent.basis();
    }
    ex.family.flats.emplace_back(Subspace::from_orthonormal(std::move(basis)), Vector::Zero(n));
  }
  return ex;
}

SlicingProductExample slicing_product_example(int n, int k, double s, int depth) {
  require(k >= 1 && k <= n - 1, "slicing_product_example requires 1 <= k <= n-1");
  require(s > 0.0 && s <= k, "slicing_product_example requires 0 < s <= k");
  SlicingProductExample ex;
  ex.keep = closest_base3_patterns(k, s, 0.0);
  ex.s_achieved = pattern_dimension(3, ex.keep);
  ex.expected_dimension = (n - k) + ex.s_achieved;
  std::vector<DigitPattern> all = ex.keep;
  for (int i = k; i < n; ++i) all.push_back({0, 1, 2});
  ex.set = cantor_grid(n, 3, all, depth);
  return ex;
}

int flat_slice_level_shift(int n) {
  return static_cast<int>(std::ceil(std::log2(2.0 * std::sqrt(static_cast<double>(n))) - 1e-12));
}

GridSet flat_slice(const GridSet& g, const AffineFlat& w, double rho) {
  const int n = g.dim();
  require(w.ambient_dim() == n, "flat and grid dimensions differ");
  require(w.dim() >= 1, "flat_slice needs a flat of dimension >= 1");
  require(rho >= std::ldexp(1.0, -g.level()), "rho must be at least the cell side");
  const int k = w.dim();
  const int shift = flat_slice_level_shift(n);
  const int out_level = g.level() + shift;
  // Flat coordinates lie in [-2^(shift-1), 2^(shift-1)] because centers are in [0,1]^n.
  const double half = std::ldexp(1.0, shift - 1);
  const double cells = std::ldexp(1.0, out_level);
  const Matrix& basis = w.direction().basis();
  const Vector& offset = w.offset();
  const double side = std::ldexp(1.0, -g.level());
  const double rho2 = rho * rho;
  Vector c(n), d(n), t(k);
  std::vector<std::uint32_t> coords;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto cell = g.cell(i);
    for (int j = 0; j < n; ++j) c(j) = (cell[j] + 0.5) * side;
    // offset is orthogonal to the direction, so basis^T (c - offset) = basis^T c.
    d = c - offset;
    t.noalias() = basis.transpose() * d;
    if (d.squaredNorm() - t.squaredNorm() > rho2) continue;
    for (int j = 0; j < k; ++j) {
      const double u = (t(j) + half) / (2 * half);
      coords.push_back(static_cast<std::uint32_t>(std::clamp(std::floor(u * cells), 0.0, cells - 1)));
    }
  }
  return GridSet::from_cells(k, out_level, std::move(coords));
}

Vector projector_embedding(const Subspace& u) {
  const int n = u.ambient_dim();
  const Matrix p = u.projector();
  Vector e(n * (n + 1) / 2);
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) e(idx++) = p(i, j);
  return e;
}

DimensionEstimate family_dimension(const std::vector<Subspace>& flats, int l_min, int l_max) {
  require(!flats.empty(), "family is empty");
  std::vector<Vector> points;
  points.reserve(flats.size());
  for (const auto& u : flats) {
    require(u.ambient_dim() == flats.front().ambient_dim() && u.dim() == flats.front().dim(),
            "family members live in different Grassmannians");
    points.push_back(projector_embedding(u));
  }
  return point_cloud_dimension(points, l_min, l_max);
}

DimensionEstimate family_dimension(const std::vector<AffineFlat>& flats, int l_min, int l_max) {
  require(!flats.empty(), "family is empty");
  std::vector<Vector> points;
  points.reserve(flats.size());
  for (const auto& w : flats) {
    require(w.ambient_dim() == flats.front().ambient_dim() && w.dim() == flats.front().dim(),
            "family members live in different affine Grassmannians");
    const Vector proj = projector_embedding(w.direction());
    Vector x(proj.size() + w.ambient_dim());
    x << proj, w.offset();
    points.push_back(std::move(x));
  }
  return point_cloud_dimension(points, l_min, l_max);
}

DimensionEstimate family_dimension(const std::vector<FlatLike>& flats, int l_min, int l_max) {
  require(!flats.empty(), "family is empty");
  const bool affine = std::holds_alternative<AffineFlat>(flats.front());
  if (affine) {
    std::vector<AffineFlat> list;
    for (const auto& f : flats) {
      require(std::holds_alternative<AffineFlat>(f), "family mixes subspaces and affine flats");
      list.push_back(std::get<AffineFlat>(f));
    }
    return family_dimension(list, l_min, l_max);
  }
  std::vector<Subspace> list;
  for (const auto& f : flats) {
    require(std::holds_alternative<Subspace>(f), "family mixes subspaces and affine flats");
    list.push_back(std::get<Subspace>(f));
  }
  return family_dimension(list, l_min, l_max);
}

// ---------------------------------------------------------------------------
// Serialization

void write_csv(const GridSet& g, std::ostream& out) {
  for (int j = 0; j < g.dim(); ++j) out << (j ? "," : "") << 'c' << j;
  out << '\n';
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto row = g.cell(i);
    for (int j = 0; j < g.dim(); ++j) out << (j ? "," : "") << row[j];
    out << '\n';
  }
}

GridSet read_csv(std::istream& in, int level) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "GridSet CSV is missing its header");
  const int n = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
  std::vector<std::uint32_t> coords;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string field;
    int fields = 0;
    while (std::getline(row, field, ',')) {
      try {
        coords.push_back(static_cast<std::uint32_t>(std::stoul(field)));
      } catch (const std::exception&) {
        throw ParameterError("bad GridSet CSV field '" + field + "'");
      }
      ++fields;
    }
    require(fields == n, "GridSet CSV row has the wrong number of fields");
  }
  return GridSet::from_cells(n, level, std::move(coords));
}

namespace {

void put_varint(std::ostream& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.put(static_cast<char>((v & 0x7f) | 0x80));
    v >>= 7;
  }
  out.put(static_cast<char>(v));
}

std::uint64_t get_varint(std::istream& in) {
  std::uint64_t v = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    const int ch = in.get();
    require(ch != EOF, "truncated GridSet binary stream");
    v |= static_cast<std::uint64_t>(ch & 0x7f) << shift;
    if (!(ch & 0x80)) return v;
  }
  throw ParameterError("malformed varint in GridSet binary stream");
}

}  // namespace

void write_binary(const GridSet& g, std::ostream& out) {
  const int n = g.dim();
  const int level = g.level();
  require(static_cast<long long>(n) * level <= 64 && n <= 255, "binary format needs n * level <= 64");
  // Cells are sorted lexicographically, which is the order of their linear index.
  std::vector<std::uint64_t> linear(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::uint64_t key = 0;
    for (auto c : g.cell(i)) key = level == 0 ? 0 : (key << level) | c;
    linear[i] = key;
  }
  std::vector<std::pair<std::uint64_t, std::uint64_t>> runs;  // (start, length)
  for (auto key : linear) {
    if (!runs.empty() && runs.back().first + runs.back().second == key)
      ++runs.back().second;
    else
      runs.emplace_back(key, 1);
  }
  out.write("GSET", 4);
  out.put(1);
  out.put(static_cast<char>(n));
  out.put(static_cast<char>(level));
  const std::uint64_t count = runs.size();
  for (int b = 0; b < 8; ++b) out.put(static_cast<char>((count >> (8 * b)) & 0xff));
  std::uint64_t prev_end = 0;
  for (const auto& [start, length] : runs) {
    put_varint(out, start - prev_end);
    put_varint(out, length);
    prev_end = start + length;
  }
}

GridSet read_binary(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  require(in.gcount() == 4 && std::string(magic, 4) == "GSET", "not a GridSet binary stream");
  const int version = in.get();
  require(version == 1, "unsupported GridSet binary version");
  const int n = in.get();
  const int level = in.get();
  require(n > 0 && level >= 0 && n * level <= 64, "corrupt GridSet binary header");
  std::uint64_t count = 0;
  for (int b = 0; b < 8; ++b) {
    const int ch = in.get();
    require(ch != EOF, "truncated GridSet binary header");
    count |= static_cast<std::uint64_t>(ch) << (8 * b);
  }
  std::vector<std::uint32_t> coords;
  const std::uint64_t mask = level == 0 ? 0 : (level == 64 ? ~0ULL : ((1ULL << level) - 1));
  std::uint64_t prev_end = 0;
  for (std::uint64_t r = 0; r < count; ++r) {
    const std::uint64_t start = prev_end + get_varint(in);
    const std::uint64_t length = get_varint(in);
    require(coords.size() / n + length <= GridSet::kMaxCells, "GridSet binary exceeds cell cap");
    for (std::uint64_t key = start; key < start + length; ++key) {
      std::vector<std::uint32_t> row(n);
      std::uint64_t k = key;
      for (int j = n - 1; j >= 0; --j) {
        row[j] = static_cast<std::uint32_t>(k & mask);
        if (level > 0 && level < 64) k >>= level;
      }
      coords.insert(coords.end(), row.begin(), row.end());
    }
    prev_end = start + length;
  }
  return GridSet::from_cells(n, level, std::move(coords));
}

nlohmann::ordered_json to_json(const DimensionEstimate& e) {
  nlohmann::ordered_json j;
  j["slope"] = e.slope;
  j["intercept"] = e.intercept;
  j["r2"] = e.r2;
  j["level_range"] = {e.level_min, e.level_max};
  j["counts"] = e.counts;
  return j;
}

}  // namespace flatlab
