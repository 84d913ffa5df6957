#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "flatlab/rational.hpp"

namespace flatlab {

/// Parameter tuple (n, k, s, t) of a (spread) Furstenberg problem.
struct BoundParams {
  int n = 0;
  int k = 0;
  Rational s;
  Rational t;
};

/// n >= 2, 1 <= k <= n-1, 0 < s <= k, 0 <= t <= (k+1)(n-k).
void validate(const BoundParams& p);

/// A formula value, or nullopt when its hypotheses do not hold.
using BoundValue = std::optional<Rational>;

/// Smallest k0 >= 1 with (7/3) 2^(k0-2) + k0 >= n.
int compute_k0(int n);

/// n - k + s - (k(n-k) - t) / (ceil(s) - k0 + 1)
/// for k >= k0 + 1, s > k0, 0 < t <= k(n-k).
BoundValue bound_spread_general(const BoundParams& p, int k0);

/// bound_spread_general with k0 = compute_k0(n).
BoundValue bound_spread_main(const BoundParams& p);

/// 1 + s - (n-1-t)/ceil(s) for n >= 3, 1 < s <= n-1, 0 < t <= n-1.
BoundValue bound_spread_hyperplane(int n, const Rational& s, const Rational& t);

/// s + (t - (k - ceil(s))(n-k)) / (ceil(s) + 1).
BoundValue bound_hera(const BoundParams& p);

/// 2s + min{t,1} - k.
BoundValue bound_hkm(const BoundParams& p);

/// For hyperplanes (k = n-1) with t in (1, n]:
/// 2s + 2 - n - (t-1)(n-1-s)/(n-1).
BoundValue bound_dov(const BoundParams& p);

/// Plane (n = 2, k = 1): min{s+t, (3s+t)/2, s+1}.
BoundValue bound_ren_wang(const BoundParams& p);

/// Non-spread hyperplane corollary, n >= 3, s > 1:
/// 1 + s - (n-1-min{t,n-1})/ceil(s).
BoundValue bound_hyperplane_corollary(const BoundParams& p);

/// Outcome of the full-flat (s = k) bound: either a dimension or the
/// statement that F has positive Lebesgue measure.
struct OberlinOutcome {
  bool applicable = false;
  bool positive_measure = false;
  BoundValue value;
};

/// 2k - k(n-k) + t when t <= (k+1)(n-k) - k, positive measure above.
/// Requires whole flats (s = k).
OberlinOutcome bound_oberlin(const BoundParams& p);

struct BoundEntry {
  std::string name;
  std::string setting;  // "furstenberg" or "spread"
  bool applicable = false;
  BoundValue value;
  bool positive_measure = false;
};

struct BoundReport {
  BoundParams params;
  std::vector<BoundEntry> entries;
  std::optional<std::string> best_name;
  BoundValue best_value;

  const BoundEntry* find(const std::string& name) const;
};

/// Evaluates every formula with applicability flags. With include_spread the
/// spread-only theorems are listed too and take part in `best`.
BoundReport bound_survey(const BoundParams& p, bool include_spread = true);

/// q-exponents of the finite field bounds for spread sets.
struct FFBoundReport {
  Rational polynomial_method;  // n s
  Rational pair_counting;      // s + (n-1)/2
  Rational zhang_upper;        // (n+1)s/2 + (n-1)/2
  Rational ddl_lower;          // n - k + s
};

FFBoundReport ff_bound_exponents(int n, int k, const Rational& s);

/// (k-k0+1)(n-k+k0) - k(n-k) + t.
Rational alpha_affine_step(int n, int k, int k0, const Rational& t);

nlohmann::ordered_json to_json(const BoundReport& report);
nlohmann::ordered_json to_json(const FFBoundReport& report);

}  // namespace flatlab
