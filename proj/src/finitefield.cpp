#include "flatlab/finitefield.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "flatlab/common.hpp"

namespace flatlab {

namespace {

int mod(long long a, int q) {
  const long long r = a % q;
  return static_cast<int>(r < 0 ? r + q : r);
}

int inverse_mod(int a, int q) {
  // q is prime: a^(q-2).
  long long result = 1, base = mod(a, q);
  for (int e = q - 2; e > 0; e >>= 1) {
    if (e & 1) result = result * base % q;
    base = base * base % q;
  }
  return static_cast<int>(result);
}

std::uint64_t ipow(int q, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= static_cast<std::uint64_t>(q);
  return r;
}

void check_field(int q, int n) {
  if (!is_prime(q)) throw ParameterError("q = " + std::to_string(q) + " is not prime; only prime fields are supported");
  require(n >= 1, "n must be positive");
  require(static_cast<double>(n) * std::log2(static_cast<double>(q)) <= 40.0, "F_q^n is too large");
}

// Enumerates RREF matrices with the given pivots; free entries run through F_q.
void enumerate_with_pivots(int q, int n, int k, const std::vector<int>& pivots,
                           std::vector<FFSubspace>& out) {
  std::vector<std::pair<int, int>> free_slots;
  for (int i = 0; i < k; ++i)
    for (int c = pivots[i] + 1; c < n; ++c)
      if (!std::binary_search(pivots.begin(), pivots.end(), c)) free_slots.emplace_back(i, c);
  std::vector<int> values(free_slots.size(), 0);
  while (true) {
    FFSubspace s{q, n, k, std::vector<int>(static_cast<std::size_t>(k) * n, 0), pivots};
    for (int i = 0; i < k; ++i) s.rref[i * n + pivots[i]] = 1;
    for (std::size_t f = 0; f < free_slots.size(); ++f)
      s.rref[free_slots[f].first * n + free_slots[f].second] = values[f];
    out.push_back(std::move(s));
    std::size_t j = 0;
    while (j < values.size() && ++values[j] == q) values[j++] = 0;
    if (j == values.size()) break;
  }
}

}  // namespace

// ---------------------------------------------------------------------------

FFPoint FFSubspace::reduce(const FFPoint& x) const {
  require(static_cast<int>(x.size()) == n, "point dimension mismatch");
  FFPoint y(n);
  for (int j = 0; j < n; ++j) y[j] = mod(x[j], q);
  for (int i = 0; i < k; ++i) {
    const int coef = y[pivots[i]];
    if (coef == 0) continue;
    for (int j = 0; j < n; ++j) y[j] = mod(y[j] - static_cast<long long>(coef) * rref[i * n + j], q);
  }
  return y;
}

std::size_t FFSubspace::coset_id(const FFPoint& x) const {
  const FFPoint y = reduce(x);
  std::size_t id = 0;
  for (int j = 0; j < n; ++j) {
    if (std::binary_search(pivots.begin(), pivots.end(), j)) continue;
    id = id * static_cast<std::size_t>(q) + static_cast<std::size_t>(y[j]);
  }
  return id;
}

FFSubspace ff_subspace_from_rows(int q, int n, const std::vector<FFPoint>& rows) {
  check_field(q, n);
  const int k = static_cast<int>(rows.size());
  require(k <= n, "too many spanning rows");
  std::vector<std::vector<int>> m;
  for (const auto& r : rows) {
    require(static_cast<int>(r.size()) == n, "row dimension mismatch");
    std::vector<int> row(n);
    for (int j = 0; j < n; ++j) row[j] = mod(r[j], q);
    m.push_back(std::move(row));
  }
  std::vector<int> pivots;
  int rank = 0;
  for (int col = 0; col < n && rank < k; ++col) {
    int sel = -1;
    for (int i = rank; i < k; ++i)
      if (m[i][col] != 0) {
        sel = i;
        break;
      }
    if (sel < 0) continue;
    std::swap(m[sel], m[rank]);
    const int inv = inverse_mod(m[rank][col], q);
    for (auto& v : m[rank]) v = static_cast<int>(static_cast<long long>(v) * inv % q);
    for (int i = 0; i < k; ++i) {
      if (i == rank || m[i][col] == 0) continue;
      const int f = m[i][col];
      for (int j = 0; j < n; ++j) m[i][j] = mod(m[i][j] - static_cast<long long>(f) * m[rank][j], q);
    }
    pivots.push_back(col);
    ++rank;
  }
  require(rank == k, "spanning rows are linearly dependent");
  FFSubspace s{q, n, k, {}, pivots};
  for (const auto& row : m) s.rref.insert(s.rref.end(), row.begin(), row.end());
  return s;
}

FFSet::FFSet(int q, int n) : q_(q), n_(n) { check_field(q, n); }

FFSet::FFSet(int q, int n, const std::vector<FFPoint>& points) : FFSet(q, n) {
  for (const auto& p : points) {
    require(static_cast<int>(p.size()) == n, "point dimension mismatch");
    FFPoint r(n);
    for (int j = 0; j < n; ++j) r[j] = mod(p[j], q);
    points_.push_back(std::move(r));
  }
  std::sort(points_.begin(), points_.end());
  points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
}

FFSet FFSet::whole_space(int q, int n) {
  check_field(q, n);
  std::vector<std::uint64_t> all(ipow(q, n));
  for (std::uint64_t i = 0; i < all.size(); ++i) all[i] = i;
  return from_indices(q, n, all);
}

FFSet FFSet::from_indices(int q, int n, const std::vector<std::uint64_t>& indices) {
  std::vector<FFPoint> pts;
  pts.reserve(indices.size());
  for (auto i : indices) pts.push_back(ff_point_from_index(q, n, i));
  return FFSet(q, n, pts);
}

bool FFSet::contains(const FFPoint& x) const {
  return std::binary_search(points_.begin(), points_.end(), x);
}

bool is_prime(int q) {
  if (q < 2) return false;
  for (int d = 2; static_cast<long long>(d) * d <= q; ++d)
    if (q % d == 0) return false;
  return true;
}

std::uint64_t ff_point_index(int q, const FFPoint& x) {
  std::uint64_t idx = 0;
  for (int v : x) idx = idx * static_cast<std::uint64_t>(q) + static_cast<std::uint64_t>(mod(v, q));
  return idx;
}

FFPoint ff_point_from_index(int q, int n, std::uint64_t index) {
  FFPoint x(n);
  for (int j = n - 1; j >= 0; --j) {
    x[j] = static_cast<int>(index % static_cast<std::uint64_t>(q));
    index /= static_cast<std::uint64_t>(q);
  }
  return x;
}

BigInt gaussian_binomial(int n, int k, int q) {
  require(k >= 0 && k <= n, "gaussian_binomial requires 0 <= k <= n");
  require(q >= 2, "gaussian_binomial requires q >= 2");
  BigInt num = 1, den = 1;
  for (int i = 0; i < k; ++i) {
    num *= boost::multiprecision::pow(BigInt(q), static_cast<unsigned>(n - i)) - 1;
    den *= boost::multiprecision::pow(BigInt(q), static_cast<unsigned>(i + 1)) - 1;
  }
  return num / den;
}

std::vector<FFSubspace> ff_directions(int q, int n, int k) {
  check_field(q, n);
  require(k >= 1 && k <= n - 1, "ff_directions requires 1 <= k <= n-1");
  if (gaussian_binomial(n, k, q) > 1'000'000) throw ParameterError("more than 10^6 subspaces requested");
  std::vector<FFSubspace> out;
  // Pivot column sets in lexicographic order.
  std::vector<int> pivots(k);
  for (int i = 0; i < k; ++i) pivots[i] = i;
  while (true) {
    enumerate_with_pivots(q, n, k, pivots, out);
    int i = k - 1;
    while (i >= 0 && pivots[i] == n - k + i) --i;
    if (i < 0) break;
    ++pivots[i];
    for (int j = i + 1; j < k; ++j) pivots[j] = pivots[j - 1] + 1;
  }
  return out;
}

CosetProfile ff_coset_profile(const FFSet& f, const FFSubspace& p) {
  require(f.q() == p.q && f.n() == p.n, "set and subspace live over different spaces");
  CosetProfile prof;
  prof.counts.assign(ipow(p.q, p.n - p.k), 0);
  for (const auto& x : f.points()) ++prof.counts[p.coset_id(x)];
  const auto best = std::max_element(prof.counts.begin(), prof.counts.end());
  prof.max_count = *best;
  // Rebuild the canonical representative of the winning coset from its id.
  auto id = static_cast<std::uint64_t>(best - prof.counts.begin());
  prof.best_offset.assign(p.n, 0);
  for (int j = p.n - 1; j >= 0; --j) {
    if (std::binary_search(p.pivots.begin(), p.pivots.end(), j)) continue;
    prof.best_offset[j] = static_cast<int>(id % static_cast<std::uint64_t>(p.q));
    id /= static_cast<std::uint64_t>(p.q);
  }
  return prof;
}

bool ff_is_kakeya(const FFSet& k) {
  if (k.n() < 2) return k.size() == static_cast<std::size_t>(k.q());
  for (const auto& dir : ff_directions(k.q(), k.n(), 1))
    if (ff_coset_profile(k, dir).max_count < k.q()) return false;
  return true;
}

bool ff_is_spread_furstenberg(const FFSet& f, int k, int min_points, int min_directions) {
  require(min_points >= 1 && min_directions >= 1, "thresholds must be positive");
  int good = 0;
  for (const auto& dir : ff_directions(f.q(), f.n(), k))
    if (ff_coset_profile(f, dir).max_count >= min_points && ++good >= min_directions) return true;
  return false;
}

bool ff_pigeonhole_verify(const FFSet& f, int k) {
  const std::uint64_t cosets = ipow(f.q(), f.n() - k);
  const auto need = static_cast<int>((f.size() + cosets - 1) / cosets);
  for (const auto& dir : ff_directions(f.q(), f.n(), k))
    if (ff_coset_profile(f, dir).max_count < need) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Minimal-size search

namespace {

class SpreadSearch {
 public:
  SpreadSearch(int q, int n, int k, int m, std::uint64_t max_nodes)
      : q_(q), n_(n), m_(m), max_nodes_(max_nodes) {
    points_ = static_cast<int>(ipow(q, n));
    cosets_ = static_cast<int>(ipow(q, n - k));
    const auto dirs = ff_directions(q, n, k);
    dirs_ = static_cast<int>(dirs.size());
    coset_of_.resize(static_cast<std::size_t>(dirs_) * points_);
    for (int d = 0; d < dirs_; ++d)
      for (int p = 0; p < points_; ++p)
        coset_of_[d * points_ + p] = static_cast<int>(dirs[d].coset_id(ff_point_from_index(q, n, p)));
    // suffix_[(d * cosets + c) * (points+1) + i]: points >= i in coset c of direction d.
    suffix_.assign(static_cast<std::size_t>(dirs_) * cosets_ * (points_ + 1), 0);
    for (int d = 0; d < dirs_; ++d)
      for (int i = points_ - 1; i >= 0; --i)
        for (int c = 0; c < cosets_; ++c)
          suffix_[idx(d, c, i)] = suffix_[idx(d, c, i + 1)] + (coset_of_[d * points_ + i] == c ? 1 : 0);
  }

  int points() const { return points_; }
  std::uint64_t nodes() const { return nodes_; }

  bool satisfied(const std::vector<int>& chosen) {
    std::vector<int> counts(cosets_);
    for (int d = 0; d < dirs_; ++d) {
      std::fill(counts.begin(), counts.end(), 0);
      bool ok = false;
      for (int p : chosen)
        if (++counts[coset_of_[d * points_ + p]] >= m_) {
          ok = true;
          break;
        }
      if (!ok) return false;
    }
    return true;
  }

  /// Plain enumeration of all subsets of the given size in lex order.
  bool exhaustive(int size, std::vector<int>& out) {
    std::vector<int> comb(size);
    for (int i = 0; i < size; ++i) comb[i] = i;
    while (true) {
      tick();
      if (satisfied(comb)) {
        out = comb;
        return true;
      }
      int i = size - 1;
      while (i >= 0 && comb[i] == points_ - size + i) --i;
      if (i < 0) return false;
      ++comb[i];
      for (int j = i + 1; j < size; ++j) comb[j] = comb[j - 1] + 1;
    }
  }

  /// Depth-first search in lex order with direction-based pruning.
  bool branch_and_bound(int size, std::vector<int>& out) {
    counts_.assign(static_cast<std::size_t>(dirs_) * cosets_, 0);
    chosen_.clear();
    if (dfs(size, 0)) {
      out = chosen_;
      return true;
    }
    return false;
  }

 private:
  std::size_t idx(int d, int c, int i) const {
    return (static_cast<std::size_t>(d) * cosets_ + c) * (points_ + 1) + i;
  }

  void tick() {
    if (++nodes_ > max_nodes_) throw BudgetExceededError("finite field search exceeded its node budget");
  }

  // Can every direction still reach m with `slots` more points from index >= next?
  bool feasible(int slots, int next) const {
    for (int d = 0; d < dirs_; ++d) {
      bool ok = false;
      for (int c = 0; c < cosets_ && !ok; ++c) {
        const int have = counts_[d * cosets_ + c];
        ok = have + std::min(slots, suffix_[idx(d, c, next)]) >= m_;
      }
      if (!ok) return false;
    }
    return true;
  }

  bool dfs(int size, int next) {
    tick();
    const int slots = size - static_cast<int>(chosen_.size());
    if (!feasible(slots, next)) return false;
    if (slots == 0) return true;
    for (int p = next; p <= points_ - slots; ++p) {
      chosen_.push_back(p);
      for (int d = 0; d < dirs_; ++d) ++counts_[d * cosets_ + coset_of_[d * points_ + p]];
      if (dfs(size, p + 1)) return true;
      for (int d = 0; d < dirs_; ++d) --counts_[d * cosets_ + coset_of_[d * points_ + p]];
      chosen_.pop_back();
    }
    return false;
  }

  int q_, n_, m_;
  std::uint64_t max_nodes_;
  int points_ = 0, cosets_ = 0, dirs_ = 0;
  std::vector<int> coset_of_;
  std::vector<int> suffix_;
  std::vector<int> counts_;
  std::vector<int> chosen_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

SearchResult ff_min_spread(int q, int n, int k, int m, SearchMode mode, std::uint64_t max_nodes) {
  check_field(q, n);
  require(k >= 1 && k <= n - 1, "ff_min_spread requires 1 <= k <= n-1");
  require(m >= 1 && static_cast<std::uint64_t>(m) <= ipow(q, k), "m must satisfy 1 <= m <= q^k");
  const std::uint64_t space = ipow(q, n);
  if (mode == SearchMode::Exhaustive && space > 16)
    throw ParameterError("exhaustive search needs q^n <= 16; use branch-and-bound mode");
  require(space <= 4096, "search space too large (q^n must be <= 4096)");
  const bool exhaustive = mode == SearchMode::Exhaustive || (mode == SearchMode::Auto && space <= 16);

  const auto start = std::chrono::steady_clock::now();
  SpreadSearch search(q, n, k, m, max_nodes);
  std::vector<int> found;
  for (int size = m; size <= search.points(); ++size) {
    const bool hit = exhaustive ? search.exhaustive(size, found) : search.branch_and_bound(size, found);
    if (hit) {
      std::vector<std::uint64_t> idx(found.begin(), found.end());
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      return {size, FFSet::from_indices(q, n, idx), search.nodes(), elapsed.count()};
    }
  }
  throw InvariantError("F_q^n itself must satisfy every spread condition");
}

SearchResult ff_min_kakeya(int q, int n, SearchMode mode, std::uint64_t max_nodes) {
  require(n >= 2, "ff_min_kakeya requires n >= 2");
  return ff_min_spread(q, n, 1, q, mode, max_nodes);
}

void write_csv(const FFSet& f, std::ostream& out) {
  for (int j = 0; j < f.n(); ++j) out << (j ? "," : "") << 'x' << j;
  out << '\n';
  for (const auto& p : f.points()) {
    for (int j = 0; j < f.n(); ++j) out << (j ? "," : "") << p[j];
    out << '\n';
  }
}

FFSet read_ff_csv(std::istream& in, int q) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "FFSet CSV is missing its header");
  const int n = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
  std::vector<FFPoint> pts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string field;
    FFPoint p;
    while (std::getline(row, field, ',')) {
      try {
        p.push_back(std::stoi(field));
      } catch (const std::exception&) {
        throw ParameterError("bad FFSet CSV field '" + field + "'");
      }
    }
    require(static_cast<int>(p.size()) == n, "FFSet CSV row has the wrong number of fields");
    pts.push_back(std::move(p));
  }
  return FFSet(q, n, pts);
}

nlohmann::ordered_json to_json(const SearchResult& r, bool with_wall_time) {
  nlohmann::ordered_json j;
  j["size"] = r.size;
  j["witness"] = r.witness.points();
  j["nodes_explored"] = r.nodes_explored;
  if (with_wall_time) j["wall_time"] = r.wall_time;
  return j;
}

}  // namespace flatlab
