#include "flatlab/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "flatlab/parallel.hpp"

namespace flatlab {

namespace {

constexpr double kMinDelta = 1.0 / 256.0;

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

void check_shape(int n, int level) {
  require(n >= 1 && n <= MaximalField::kMaxDim, "MaximalField supports 1 <= n <= 4");
  require(level >= 0 && level <= 23, "level out of range");
  require(static_cast<long long>(n) * (level + 1) <= 24, "field would exceed 2^24 cells");
}

// Squared distance along one scanline of the last axis. With y = x - a and
// an orthonormal basis B of U: |q|^2 = |y|^2 - |p|^2, p = B^T y.
struct Scanline {
  int n = 0;
  int k = 0;
  const double* basis = nullptr;  // n x k, row-major
  double y[MaximalField::kMaxDim] = {};
  double p0[MaximalField::kMaxDim] = {};
  double y_sq = 0.0;

  void reset(const double* x_prefix, const double* a, const double* b, int n_, int k_) {
    n = n_;
    k = k_;
    basis = b;
    for (int i = 0; i < n - 1; ++i) y[i] = x_prefix[i] - a[i];
    y[n - 1] = -a[n - 1];
    y_sq = 0.0;
    for (int i = 0; i < n - 1; ++i) y_sq += y[i] * y[i];
    for (int j = 0; j < k; ++j) {
      double s = 0.0;
      for (int i = 0; i < n - 1; ++i) s += basis[i * k + j] * y[i];
      p0[j] = s;
    }
  }

  // Last coordinate of x equal to z.
  double dist_sq(double z) const {
    const double yn = y[n - 1] + z;
    double p_sq = 0.0;
    for (int j = 0; j < k; ++j) {
      const double pj = p0[j] + basis[(n - 1) * k + j] * yn;
      p_sq += pj * pj;
    }
    const double q_sq = std::max(0.0, y_sq + yn * yn - p_sq);
    const double excess = std::max(0.0, std::sqrt(p_sq) - 0.5);
    return q_sq + excess * excess;
  }
};

// Index ranges of the cells whose centers can lie in the tube.
struct TubeBox {
  std::vector<long> lo;
  std::vector<long> hi;
};

TubeBox tube_box(const MaximalField& f, const Matrix& basis, const Vector& a, double delta) {
  const int n = f.dim();
  const double h = f.cell_side();
  TubeBox box{std::vector<long>(n), std::vector<long>(n)};
  for (int i = 0; i < n; ++i) {
    const double e = 0.5 * basis.row(i).norm() + delta;
    box.lo[i] = static_cast<long>(std::ceil((a(i) - e + 1.0) / h - 0.5));
    box.hi[i] = static_cast<long>(std::floor((a(i) + e + 1.0) / h - 0.5));
  }
  return box;
}

void check_tube(const MaximalField& f, const TubeSpec& t) {
  require(t.center.size() == f.dim() && t.direction.ambient_dim() == f.dim(), "tube dimension mismatch");
  require(t.radius > 0 && t.radius <= 0.5, "tube radius must lie in (0, 1/2]");
  require(t.radius >= kMinDelta, "tube radius below 2^-8");
  require(f.cell_side() <= t.radius / 4.0 + 1e-15, "field resolution too coarse for this tube radius");
}

double tube_average_unchecked(const MaximalField& f, const Matrix& basis, const std::vector<double>& b_rows,
                              const Vector& a, double delta, const TubeBox& box) {
  const int n = f.dim();
  const int k = static_cast<int>(basis.cols());
  const double h = f.cell_side();
  const double delta_sq = delta * delta;
  auto center_of = [h](long j) { return -1.0 + (static_cast<double>(j) + 0.5) * h; };

  double sum = 0.0;
  long long count = 0;
  std::vector<long> prefix(n - 1);
  for (int i = 0; i < n - 1; ++i) prefix[i] = box.lo[i];
  for (int i = 0; i < n - 1; ++i)
    if (box.lo[i] > box.hi[i]) return 0.0;

  double xp[MaximalField::kMaxDim] = {};
  Scanline line;
  while (true) {
    for (int i = 0; i < n - 1; ++i) xp[i] = center_of(prefix[i]);
    line.reset(xp, a.data(), b_rows.data(), n, k);
    auto d = [&](long j) { return line.dist_sq(center_of(j)); };

    // Squared distance is convex along the line: find its minimum, then the
    // sublevel interval {d <= delta^2} by bisection on either side.
    long lo = box.lo[n - 1], hi = box.hi[n - 1];
    while (hi - lo > 2) {
      const long m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
      const double f1 = d(m1), f2 = d(m2);
      if (f1 < f2)
        hi = m2 - 1;
      else if (f1 > f2)
        lo = m1 + 1;
      else {
        lo = m1;
        hi = m2;
      }
    }
    long best = lo;
    for (long j = lo + 1; j <= hi; ++j)
      if (d(j) < d(best)) best = j;
    if (best >= box.lo[n - 1] && d(best) <= delta_sq) {
      long l = box.lo[n - 1], r = best;  // leftmost inside
      while (l < r) {
        const long m = l + (r - l) / 2;
        if (d(m) <= delta_sq)
          r = m;
        else
          l = m + 1;
      }
      const long left = l;
      l = best;
      r = box.hi[n - 1];  // rightmost inside
      while (l < r) {
        const long m = l + (r - l + 1) / 2;
        if (d(m) <= delta_sq)
          l = m;
        else
          r = m - 1;
      }
      count += l - left + 1;
      sum += f.line_sum(prefix, left, l);
    }

    int i = n - 2;
    while (i >= 0 && prefix[i] == box.hi[i]) {
      prefix[i] = box.lo[i];
      --i;
    }
    if (i < 0) break;
    ++prefix[i];
  }
  return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

std::vector<double> rows_of(const Matrix& basis) {
  std::vector<double> out(static_cast<std::size_t>(basis.size()));
  for (Eigen::Index i = 0; i < basis.rows(); ++i)
    for (Eigen::Index j = 0; j < basis.cols(); ++j) out[i * basis.cols() + j] = basis(i, j);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

MaximalField::MaximalField(int n, int level, std::vector<double> values)
    : n_(n), level_(level), side_(0), values_(std::move(values)) {
  check_shape(n, level);
  side_ = 1 << (level + 1);
  const std::size_t cells = ipow(static_cast<std::size_t>(side_), n);
  require(values_.size() == cells, "value array has the wrong size");
  support_lo_.assign(n, side_);
  support_hi_.assign(n, -1);
  const std::size_t lines = cells / static_cast<std::size_t>(side_);
  prefix_.assign(lines * (side_ + 1), 0.0);
  std::vector<long> idx(n, 0);
  for (std::size_t c = 0; c < cells; ++c) {
    const double v = values_[c];
    require(std::isfinite(v) && v >= 0.0, "field values must be finite and nonnegative");
    sup_ = std::max(sup_, v);
    if (v > 0) {
      for (int i = 0; i < n; ++i) {
        support_lo_[i] = std::min(support_lo_[i], idx[i]);
        support_hi_[i] = std::max(support_hi_[i], idx[i]);
      }
    }
    const std::size_t line = c / side_, pos = c % side_;
    prefix_[line * (side_ + 1) + pos + 1] = prefix_[line * (side_ + 1) + pos] + v;
    for (int i = n - 1; i >= 0; --i) {
      if (++idx[i] < side_) break;
      idx[i] = 0;
    }
  }
}

MaximalField MaximalField::constant(int n, int level, double value) {
  check_shape(n, level);
  return {n, level, std::vector<double>(ipow(std::size_t{2} << level, n), value)};
}

MaximalField MaximalField::from_function(int n, int level, const std::function<double(const Vector&)>& f) {
  check_shape(n, level);
  const long side = 2L << level;
  const std::size_t cells = ipow(static_cast<std::size_t>(side), n);
  const double h = std::ldexp(1.0, -level);
  std::vector<double> values(cells);
  Vector x(n);
  std::vector<long> idx(n, 0);
  for (std::size_t c = 0; c < cells; ++c) {
    for (int i = 0; i < n; ++i) x(i) = -1.0 + (static_cast<double>(idx[i]) + 0.5) * h;
    values[c] = f(x);
    for (int i = n - 1; i >= 0; --i) {
      if (++idx[i] < side) break;
      idx[i] = 0;
    }
  }
  return {n, level, std::move(values)};
}

MaximalField MaximalField::ball_indicator(int n, int level, double radius, const Vector& center) {
  require(center.size() == n, "center dimension mismatch");
  return from_function(n, level, [&](const Vector& x) { return (x - center).norm() <= radius ? 1.0 : 0.0; });
}

double MaximalField::cell_side() const { return std::ldexp(1.0, -level_); }

Vector MaximalField::center(const std::vector<long>& idx) const {
  require(static_cast<int>(idx.size()) == n_, "index dimension mismatch");
  Vector x(n_);
  for (int i = 0; i < n_; ++i) x(i) = -1.0 + (static_cast<double>(idx[i]) + 0.5) * cell_side();
  return x;
}

MaximalField MaximalField::shifted(const std::vector<int>& shift) const {
  require(static_cast<int>(shift.size()) == n_, "shift dimension mismatch");
  std::vector<double> out(values_.size(), 0.0);
  std::vector<long> idx(n_, 0);
  for (std::size_t c = 0; c < values_.size(); ++c) {
    std::size_t target = 0;
    bool inside = true;
    for (int i = 0; i < n_; ++i) {
      const long j = idx[i] + shift[i];
      if (j < 0 || j >= side_) {
        inside = false;
        break;
      }
      target = target * side_ + static_cast<std::size_t>(j);
    }
    if (inside) out[target] = values_[c];
    for (int i = n_ - 1; i >= 0; --i) {
      if (++idx[i] < side_) break;
      idx[i] = 0;
    }
  }
  return {n_, level_, std::move(out)};
}

double MaximalField::line_sum(const std::vector<long>& prefix_idx, long lo, long hi) const {
  std::size_t line = 0;
  for (int i = 0; i < n_ - 1; ++i) {
    if (prefix_idx[i] < 0 || prefix_idx[i] >= side_) return 0.0;
    line = line * side_ + static_cast<std::size_t>(prefix_idx[i]);
  }
  lo = std::max(lo, 0L);
  hi = std::min(hi, static_cast<long>(side_) - 1);
  if (lo > hi) return 0.0;
  const double* row = prefix_.data() + line * (side_ + 1);
  return row[hi + 1] - row[lo];
}

bool MaximalField::support_meets(const std::vector<long>& lo, const std::vector<long>& hi) const {
  for (int i = 0; i < n_; ++i)
    if (hi[i] < support_lo_[i] || lo[i] > support_hi_[i]) return false;
  return true;
}

double tube_distance(const TubeSpec& t, const Vector& x) {
  const Vector y = x - t.center;
  const Vector p = t.direction.basis().transpose() * y;
  const double q_sq = std::max(0.0, y.squaredNorm() - p.squaredNorm());
  const double excess = std::max(0.0, p.norm() - 0.5);
  return std::sqrt(q_sq + excess * excess);
}

double tube_average(const MaximalField& f, const TubeSpec& t) {
  check_tube(f, t);
  const Matrix& basis = t.direction.basis();
  return tube_average_unchecked(f, basis, rows_of(basis), t.center, t.radius,
                                tube_box(f, basis, t.center, t.radius));
}

double kakeya_maximal(const MaximalField& f, const Subspace& u, double delta, double search_step) {
  return kakeya_maximal(f, u, delta, search_step, Vector::Zero(f.dim()));
}

double kakeya_maximal(const MaximalField& f, const Subspace& u, double delta, double search_step,
                      const Vector& center) {
  const int n = f.dim();
  check_tube(f, {u, center, delta});
  require(search_step > 0 && search_step <= delta / 2 + 1e-15, "search step must lie in (0, delta/2]");
  if (f.sup() == 0.0) return 0.0;

  const Matrix& basis = u.basis();
  const std::vector<double> b_rows = rows_of(basis);
  const Matrix perp = u.complement().basis();
  const int m = static_cast<int>(perp.cols());

  // Integer offsets with |offset| * step <= 2, nearest to the center first.
  const long reach = static_cast<long>(std::floor(2.0 / search_step + 1e-9));
  std::vector<std::vector<long>> offsets;
  std::vector<long> cur(m, -reach);
  if (m == 0) {
    offsets.emplace_back();
  } else {
    while (true) {
      long sq = 0;
      for (long v : cur) sq += v * v;
      if (sq <= reach * reach) offsets.push_back(cur);
      int i = m - 1;
      while (i >= 0 && cur[i] == reach) cur[i--] = -reach;
      if (i < 0) break;
      ++cur[i];
    }
  }
  std::stable_sort(offsets.begin(), offsets.end(), [](const auto& x, const auto& y) {
    long sx = 0, sy = 0;
    for (long v : x) sx += v * v;
    for (long v : y) sy += v * v;
    return sx < sy;
  });

  double best = 0.0;
  Vector a(n);
  for (const auto& off : offsets) {
    a = center;
    for (int j = 0; j < m; ++j) a += perp.col(j) * (static_cast<double>(off[j]) * search_step);
    const TubeBox box = tube_box(f, basis, a, delta);
    if (!f.support_meets(box.lo, box.hi)) continue;
    best = std::max(best, tube_average_unchecked(f, basis, b_rows, a, delta, box));
    if (best >= f.sup()) break;
  }
  return std::min(best, f.sup());
}

double maximal_lp_norm(const MaximalField& f, int k, double delta, double p, int ndirs, Seed seed) {
  require(p >= 1.0, "p must be >= 1");
  require(ndirs >= 1, "ndirs must be positive");
  require(k >= 1 && k <= f.dim() - 1, "k must satisfy 1 <= k <= n-1");
  std::vector<double> values(static_cast<std::size_t>(ndirs));
  parallel_for(values.size(), [&](std::size_t i) {
    values[i] = kakeya_maximal(f, haar_sample(f.dim(), k, derive_seed(seed, i)), delta, delta / 2);
  });
  double acc = 0.0;
  for (double v : values) acc += std::pow(v, p);
  return std::pow(acc / ndirs, 1.0 / p);
}

std::vector<ScalingRow> maximal_scaling(int ntubes, double p, const std::vector<double>& deltas, int ndirs,
                                        Seed seed) {
  require(ntubes >= 1, "ntubes must be positive");
  Rng rng(derive_seed(seed, 0));
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  std::uniform_real_distribution<double> shift(-0.5, 0.5);
  std::vector<TubeSpec> tubes;
  for (int i = 0; i < ntubes; ++i) {
    const double th = angle(rng);
    Matrix dir(2, 1);
    dir << std::cos(th), std::sin(th);
    Vector c(2);
    c(0) = shift(rng);
    c(1) = shift(rng);
    tubes.push_back({Subspace::span(dir), c, 0.0});
  }

  std::vector<ScalingRow> rows;
  for (double delta : deltas) {
    require(delta >= kMinDelta && delta <= 0.5, "delta must lie in [2^-8, 1/2]");
    const int level = static_cast<int>(std::ceil(std::log2(4.0 / delta) - 1e-12));
    for (auto& t : tubes) t.radius = delta;
    const MaximalField f = MaximalField::from_function(2, level, [&](const Vector& x) {
      for (const auto& t : tubes)
        if (tube_distance(t, x) <= delta) return 1.0;
      return 0.0;
    });
    rows.push_back({delta, level, maximal_lp_norm(f, 1, delta, p, ndirs, derive_seed(seed, 1))});
  }
  return rows;
}

void write_scaling_csv(const std::vector<ScalingRow>& rows, std::ostream& out) {
  out << "delta,level,norm\n";
  out.precision(17);
  for (const auto& r : rows) out << r.delta << ',' << r.level << ',' << r.norm << '\n';
}

void write_scaling_plot_script(const std::string& csv_name, std::ostream& out) {
  out << "import csv\n"
         "import matplotlib.pyplot as plt\n\n"
         "with open('"
      << csv_name
      << "') as fh:\n"
         "    rows = list(csv.DictReader(fh))\n"
         "delta = [float(r['delta']) for r in rows]\n"
         "norm = [float(r['norm']) for r in rows]\n"
         "plt.loglog(delta, norm, marker='o')\n"
         "plt.xlabel('delta')\n"
         "plt.ylabel('maximal function norm')\n"
         "plt.gca().invert_xaxis()\n"
         "plt.savefig('"
      << csv_name << ".png', dpi=150)\n";
}

}  // namespace flatlab
