#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "flatlab/common.hpp"
#include "flatlab/finitefield.hpp"

using namespace flatlab;

namespace {

std::uint64_t ipow(int q, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= q;
  return r;
}

std::vector<FFPoint> all_points(int q, int n) {
  std::vector<FFPoint> out;
  for (std::uint64_t i = 0; i < ipow(q, n); ++i) out.push_back(ff_point_from_index(q, n, i));
  return out;
}

// Subspaces as point sets: span all k-tuples of vectors and keep the
// distinct spans of size q^k.
std::size_t count_subspaces_oracle(int q, int n, int k) {
  const auto pts = all_points(q, n);
  std::set<std::set<std::uint64_t>> spans;
  std::vector<std::size_t> pick(k, 0);
  while (true) {
    std::set<std::uint64_t> span;
    std::vector<int> coef(k, 0);
    while (true) {
      FFPoint x(n, 0);
      for (int j = 0; j < k; ++j)
        for (int c = 0; c < n; ++c) x[c] = (x[c] + coef[j] * pts[pick[j]][c]) % q;
      span.insert(ff_point_index(q, x));
      int j = k - 1;
      while (j >= 0 && ++coef[j] == q) coef[j--] = 0;
      if (j < 0) break;
    }
    if (span.size() == ipow(q, k)) spans.insert(span);
    int j = k - 1;
    while (j >= 0 && ++pick[j] == pts.size()) pick[j--] = 0;
    if (j < 0) break;
  }
  return spans.size();
}

// Brute-force Kakeya test: every nonzero a, some b with {at + b} in K.
bool kakeya_oracle(int q, int n, const std::set<std::uint64_t>& k) {
  for (const auto& a : all_points(q, n)) {
    bool zero = true;
    for (int c : a) zero = zero && c == 0;
    if (zero) continue;
    bool found = false;
    for (const auto& b : all_points(q, n)) {
      bool all_in = true;
      for (int t = 0; t < q && all_in; ++t) {
        FFPoint x(n);
        for (int c = 0; c < n; ++c) x[c] = (a[c] * t + b[c]) % q;
        all_in = k.count(ff_point_index(q, x)) > 0;
      }
      if (all_in) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

FFSet from_mask(int q, int n, std::uint64_t mask) {
  std::vector<std::uint64_t> idx;
  for (std::uint64_t i = 0; i < ipow(q, n); ++i)
    if (mask >> i & 1) idx.push_back(i);
  return FFSet::from_indices(q, n, idx);
}

}  // namespace

TEST(Primes, Basic) {
  for (int p : {2, 3, 5, 7, 11, 13}) EXPECT_TRUE(is_prime(p));
  for (int c : {0, 1, 4, 6, 9, 15}) EXPECT_FALSE(is_prime(c));
}

TEST(GaussianBinomial, Values) {
  EXPECT_EQ(gaussian_binomial(4, 2, 2), BigInt(35));
  for (int q : {2, 3, 5, 7})
    for (int n = 1; n <= 6; ++n) {
      EXPECT_EQ(gaussian_binomial(n, 1, q), BigInt((ipow(q, n) - 1) / (q - 1)));
      EXPECT_EQ(gaussian_binomial(n, 0, q), BigInt(1));
      for (int k = 0; k <= n; ++k) EXPECT_EQ(gaussian_binomial(n, k, q), gaussian_binomial(n, n - k, q));
    }
  EXPECT_EQ(gaussian_binomial(20, 10, 7) > BigInt(1) << 200, true);
}

TEST(Directions, SmallCounts) {
  EXPECT_EQ(ff_directions(2, 2, 1).size(), 3u);
  EXPECT_EQ(ff_directions(3, 2, 1).size(), 4u);
  EXPECT_THROW(ff_directions(4, 2, 1), ParameterError);
  EXPECT_THROW(ff_directions(3, 2, 2), ParameterError);
  EXPECT_THROW(ff_directions(7, 8, 4), ParameterError);
}

TEST(Directions, CountMatchesGaussianBinomial) {
  for (int q : {2, 3, 5})
    for (int n = 2; n <= 4; ++n)
      for (int k = 1; k <= n - 1; ++k)
        EXPECT_EQ(BigInt(ff_directions(q, n, k).size()), gaussian_binomial(n, k, q)) << q << n << k;
}

TEST(Directions, MatchesSpanOracle) {
  for (auto [q, n, k] : {std::tuple{2, 3, 1}, std::tuple{2, 3, 2}, std::tuple{3, 3, 1}, std::tuple{2, 4, 2}})
    EXPECT_EQ(ff_directions(q, n, k).size(), count_subspaces_oracle(q, n, k));
}

TEST(Directions, CanonicalRref) {
  for (int q : {2, 3, 5}) {
    const auto dirs = ff_directions(q, 4, 2);
    std::set<std::vector<int>> seen;
    for (const auto& p : dirs) {
      EXPECT_TRUE(seen.insert(p.rref).second);
      for (int r = 0; r < p.k; ++r) {
        if (r > 0) EXPECT_LT(p.pivots[r - 1], p.pivots[r]);
        for (int rr = 0; rr < p.k; ++rr) EXPECT_EQ(p.rref[rr * p.n + p.pivots[r]], rr == r ? 1 : 0);
        for (int c = 0; c < p.pivots[r]; ++c) EXPECT_EQ(p.rref[r * p.n + c], 0);
      }
      // Re-reducing the rows gives the same representation.
      std::vector<FFPoint> rows;
      for (int r = 0; r < p.k; ++r) rows.emplace_back(p.rref.begin() + r * p.n, p.rref.begin() + (r + 1) * p.n);
      std::swap(rows.front(), rows.back());
      EXPECT_EQ(ff_subspace_from_rows(q, 4, rows), p);
    }
  }
}

TEST(Subspace, FromRowsRejectsDependent) {
  EXPECT_THROW(ff_subspace_from_rows(3, 2, {{1, 2}, {2, 1}}), ParameterError);
  const FFSubspace p = ff_subspace_from_rows(3, 2, {{2, 1}});
  EXPECT_EQ(p.rref, (std::vector<int>{1, 2}));
}

TEST(FFSet, ReducesAndDeduplicates) {
  const FFSet f(3, 2, {{4, -1}, {1, 2}, {0, 0}});
  EXPECT_EQ(f.size(), 2u);
  EXPECT_TRUE(f.contains({1, 2}));
  EXPECT_TRUE(f.contains({0, 0}));
  EXPECT_FALSE(f.contains({2, 2}));
  for (std::uint64_t i = 0; i < 27; ++i) EXPECT_EQ(ff_point_index(3, ff_point_from_index(3, 3, i)), i);
  EXPECT_EQ(ff_point_index(3, {1, 0}), 3u);
}

TEST(CosetProfile, Examples) {
  for (int q : {2, 3, 5})
    for (const auto& p : ff_directions(q, 3, 1)) {
      const CosetProfile whole = ff_coset_profile(FFSet::whole_space(q, 3), p);
      EXPECT_EQ(whole.counts.size(), ipow(q, 2));
      for (int c : whole.counts) EXPECT_EQ(c, q);
      // A full coset of P through (1,1,1).
      std::vector<FFPoint> coset;
      for (int t = 0; t < q; ++t) {
        FFPoint x{1, 1, 1};
        for (int c = 0; c < 3; ++c) x[c] = (x[c] + t * p.rref[c]) % q;
        coset.push_back(x);
      }
      const CosetProfile one = ff_coset_profile(FFSet(q, 3, coset), p);
      EXPECT_EQ(one.max_count, q);
      EXPECT_EQ(p.reduce(one.best_offset), p.reduce({1, 1, 1}));
    }
}

TEST(CosetProfile, PartitionsTheSet) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const int q = trial % 2 ? 3 : 5, n = 3;
    std::vector<std::uint64_t> idx;
    for (std::uint64_t i = 0; i < ipow(q, n); ++i)
      if (rng() % 3 == 0) idx.push_back(i);
    const FFSet f = FFSet::from_indices(q, n, idx);
    for (int k = 1; k <= 2; ++k)
      for (const auto& p : ff_directions(q, n, k)) {
        const CosetProfile prof = ff_coset_profile(f, p);
        EXPECT_EQ(prof.counts.size(), ipow(q, n - k));
        int sum = 0;
        for (int c : prof.counts) sum += c;
        EXPECT_EQ(static_cast<std::size_t>(sum), f.size());
      }
  }
}

TEST(Kakeya, HandExamples) {
  const FFSet k(2, 2, {{0, 0}, {1, 0}, {0, 1}});
  EXPECT_TRUE(ff_is_kakeya(k));
  EXPECT_FALSE(ff_is_kakeya(FFSet(2, 2, {{0, 0}, {1, 0}})));
  for (int q : {2, 3, 5}) EXPECT_TRUE(ff_is_kakeya(FFSet::whole_space(q, 2)));
}

TEST(Kakeya, MatchesBruteForceOnAllSubsets) {
  for (auto [q, n] : {std::pair{2, 2}, std::pair{3, 2}, std::pair{2, 3}}) {
    const std::uint64_t total = ipow(q, n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << total); ++mask) {
      std::set<std::uint64_t> s;
      for (std::uint64_t i = 0; i < total; ++i)
        if (mask >> i & 1) s.insert(i);
      ASSERT_EQ(ff_is_kakeya(from_mask(q, n, mask)), kakeya_oracle(q, n, s)) << q << "," << n << " " << mask;
    }
  }
}

TEST(SpreadFurstenberg, Examples) {
  for (int q : {2, 3}) {
    const auto ndirs = static_cast<int>(ff_directions(q, 3, 1).size());
    EXPECT_TRUE(ff_is_spread_furstenberg(FFSet::whole_space(q, 3), 1, q, ndirs));
    EXPECT_TRUE(ff_is_spread_furstenberg(FFSet(q, 3, {{1, 0, 1}}), 1, 1, ndirs));
  }
  const FFSet line(3, 2, {{0, 0}, {1, 1}, {2, 2}});
  EXPECT_TRUE(ff_is_spread_furstenberg(line, 1, 3, 1));
  EXPECT_FALSE(ff_is_spread_furstenberg(line, 1, 3, 2));
  EXPECT_THROW(ff_is_spread_furstenberg(line, 1, 0, 1), ParameterError);
}

TEST(Pigeonhole, AllSixPointSubsetsOfPlane) {
  int subsets = 0;
  for (std::uint64_t mask = 0; mask < (1u << 9); ++mask) {
    if (__builtin_popcountll(mask) != 6) continue;
    ++subsets;
    const FFSet f = from_mask(3, 2, mask);
    EXPECT_TRUE(ff_pigeonhole_verify(f, 1));
    for (const auto& p : ff_directions(3, 2, 1)) EXPECT_GE(ff_coset_profile(f, p).max_count, 2);
  }
  EXPECT_EQ(subsets, 84);
}

TEST(Pigeonhole, RandomSets) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const int q = trial % 2 ? 3 : 5;
    const int n = 3, k = 1 + trial % 2;
    std::vector<std::uint64_t> idx;
    for (std::uint64_t i = 0; i < ipow(q, n); ++i)
      if (rng() % 4 == 0) idx.push_back(i);
    EXPECT_TRUE(ff_pigeonhole_verify(FFSet::from_indices(q, n, idx), k));
  }
}

TEST(MinKakeya, SmallCases) {
  const SearchResult r = ff_min_kakeya(2, 2);
  EXPECT_EQ(r.size, 3);
  EXPECT_TRUE(ff_is_kakeya(r.witness));
  EXPECT_EQ(r.witness.size(), 3u);
  const SearchResult r3 = ff_min_kakeya(3, 2);
  EXPECT_EQ(r3.size, 7);
  EXPECT_TRUE(ff_is_kakeya(r3.witness));
  EXPECT_GE(r3.size, 3);
}

TEST(MinKakeya, MatchesSubsetOracle) {
  // Smallest Kakeya subsets of F_3^2 by brute force over all 512 masks.
  int best = 100;
  std::uint64_t best_mask = 0;
  for (std::uint64_t mask = 0; mask < (1u << 9); ++mask) {
    std::set<std::uint64_t> s;
    for (std::uint64_t i = 0; i < 9; ++i)
      if (mask >> i & 1) s.insert(i);
    const int size = static_cast<int>(s.size());
    if (size > best || !kakeya_oracle(3, 2, s)) continue;
    // Lexicographic order on sorted index lists.
    auto lex_less = [](std::uint64_t a, std::uint64_t b) {
      for (std::uint64_t i = 0; i < 9; ++i) {
        const bool ia = a >> i & 1, ib = b >> i & 1;
        if (ia != ib) return ia;
      }
      return false;
    };
    if (size < best || lex_less(mask, best_mask)) {
      best = size;
      best_mask = mask;
    }
  }
  const SearchResult r = ff_min_kakeya(3, 2, SearchMode::BranchAndBound);
  EXPECT_EQ(r.size, best);
  EXPECT_EQ(r.witness, from_mask(3, 2, best_mask));
}

TEST(MinSpread, Examples) {
  EXPECT_EQ(ff_min_spread(2, 2, 1, 1).size, 1);
  EXPECT_EQ(ff_min_spread(3, 3, 2, 1).size, 1);
  EXPECT_EQ(ff_min_spread(2, 2, 1, 2).size, 3);
  EXPECT_EQ(ff_min_spread(3, 2, 1, 3).size, ff_min_kakeya(3, 2).size);
}

TEST(MinSpread, ModesAgree) {
  for (auto [q, n, k, m] : {std::tuple{2, 2, 1, 2}, std::tuple{2, 3, 1, 2}, std::tuple{2, 4, 1, 2},
                            std::tuple{2, 4, 2, 3}, std::tuple{3, 2, 1, 2}, std::tuple{2, 3, 2, 4}}) {
    if (ipow(q, n) > 16) continue;
    const SearchResult a = ff_min_spread(q, n, k, m, SearchMode::Exhaustive);
    const SearchResult b = ff_min_spread(q, n, k, m, SearchMode::BranchAndBound);
    EXPECT_EQ(a.size, b.size);
    EXPECT_EQ(a.witness, b.witness);
  }
}

TEST(MinSpread, SizeBracketing) {
  for (auto [q, n, k, m] : {std::tuple{2, 3, 1, 2}, std::tuple{3, 2, 1, 2}, std::tuple{2, 3, 2, 3},
                            std::tuple{3, 3, 2, 2}, std::tuple{2, 4, 2, 2}}) {
    const SearchResult r = ff_min_spread(q, n, k, m);
    EXPECT_GE(r.size, m);
    // Any q^(n-k)(m-1) + 1 points work by pigeonhole.
    EXPECT_LE(static_cast<std::uint64_t>(r.size), ipow(q, n - k) * (m - 1) + 1);
    const auto ndirs = static_cast<int>(ff_directions(q, n, k).size());
    EXPECT_TRUE(ff_is_spread_furstenberg(r.witness, k, m, ndirs));
  }
}

TEST(MinSpread, Errors) {
  EXPECT_THROW(ff_min_spread(3, 3, 1, 2, SearchMode::Exhaustive), ParameterError);
  EXPECT_THROW(ff_min_spread(4, 2, 1, 2), ParameterError);
  EXPECT_THROW(ff_min_spread(3, 3, 1, 3, SearchMode::BranchAndBound, 10), BudgetExceededError);
  EXPECT_THROW(ff_min_spread(2, 2, 1, 3), ParameterError);
}

TEST(Serialization, CsvAndJson) {
  const FFSet f(3, 2, {{0, 1}, {2, 2}});
  std::stringstream ss;
  write_csv(f, ss);
  EXPECT_EQ(ss.str(), "x0,x1\n0,1\n2,2\n");
  EXPECT_EQ(read_ff_csv(ss, 3), f);
  const SearchResult r = ff_min_kakeya(2, 2);
  const auto j = to_json(r, false);
  EXPECT_EQ(j["size"], 3);
  EXPECT_FALSE(j.contains("wall_time"));
  EXPECT_TRUE(to_json(r).contains("wall_time"));
}
