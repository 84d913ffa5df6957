#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "json.hpp"
#include "flatlab/rational.hpp"

namespace flatlab {

using FFPoint = std::vector<int>;

/// k-dimensional subspace of F_q^n in reduced row-echelon form. Two
/// subspaces are equal exactly when their RREF matrices are equal.
struct FFSubspace {
  int q = 0;
  int n = 0;
  int k = 0;
  std::vector<int> rref;    // k x n, row-major
  std::vector<int> pivots;  // strictly increasing pivot columns

  /// Canonical representative of x + P: zero in every pivot column.
  FFPoint reduce(const FFPoint& x) const;
  /// Index of the coset x + P in [0, q^(n-k)).
  std::size_t coset_id(const FFPoint& x) const;

  bool operator==(const FFSubspace& other) const = default;
};

/// Row-reduces a spanning set over F_q; throws if the rows are dependent.
FFSubspace ff_subspace_from_rows(int q, int n, const std::vector<FFPoint>& rows);

/// Set of points of F_q^n, reduced mod q, sorted and without repeats.
class FFSet {
 public:
  FFSet(int q, int n);
  FFSet(int q, int n, const std::vector<FFPoint>& points);
  static FFSet whole_space(int q, int n);
  static FFSet from_indices(int q, int n, const std::vector<std::uint64_t>& indices);

  int q() const { return q_; }
  int n() const { return n_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<FFPoint>& points() const { return points_; }
  bool contains(const FFPoint& x) const;

  bool operator==(const FFSet& other) const = default;

 private:
  int q_;
  int n_;
  std::vector<FFPoint> points_;
};

bool is_prime(int q);

/// Lexicographic index of a point (first coordinate most significant).
std::uint64_t ff_point_index(int q, const FFPoint& x);
FFPoint ff_point_from_index(int q, int n, std::uint64_t index);

/// prod_{i<k} (q^(n-i) - 1) / (q^(i+1) - 1).
BigInt gaussian_binomial(int n, int k, int q);

/// Every k-subspace of F_q^n. q must be prime and the count at most 10^6.
std::vector<FFSubspace> ff_directions(int q, int n, int k);

struct CosetProfile {
  FFPoint best_offset;
  int max_count = 0;
  std::vector<int> counts;  // points of F in each coset, indexed by coset id
};

CosetProfile ff_coset_profile(const FFSet& f, const FFSubspace& p);

/// Contains a full line in every direction.
bool ff_is_kakeya(const FFSet& k);

/// At least `min_directions` k-directions have a coset holding >= `min_points` points.
bool ff_is_spread_furstenberg(const FFSet& f, int k, int min_points, int min_directions);

/// Every k-direction has a coset with at least ceil(|F| / q^(n-k)) points.
bool ff_pigeonhole_verify(const FFSet& f, int k);

enum class SearchMode { Auto, Exhaustive, BranchAndBound };

struct SearchResult {
  int size = 0;
  FFSet witness{2, 1};
  std::uint64_t nodes_explored = 0;
  double wall_time = 0.0;  // seconds
};

/// Smallest set in which every k-direction has a coset holding at least m
/// points; the witness is the lexicographically smallest of minimal size.
/// Exhaustive mode needs q^n <= 16. `max_nodes` bounds the search.
SearchResult ff_min_spread(int q, int n, int k, int m, SearchMode mode = SearchMode::Auto,
                           std::uint64_t max_nodes = 200'000'000);

/// ff_min_spread with k = 1 and m = q.
SearchResult ff_min_kakeya(int q, int n, SearchMode mode = SearchMode::Auto,
                           std::uint64_t max_nodes = 200'000'000);

void write_csv(const FFSet& f, std::ostream& out);
FFSet read_ff_csv(std::istream& in, int q);

/// wall_time is left out when `with_wall_time` is false so reports stay
/// byte-reproducible.
nlohmann::ordered_json to_json(const SearchResult& r, bool with_wall_time = true);

}  // namespace flatlab
