#include "flatlab/bounds.hpp"

#include <algorithm>

#include "flatlab/common.hpp"

namespace flatlab {

namespace {

Rational ceil_r(const Rational& s) { return Rational(ceil(s)); }

bool params_ok(const BoundParams& p) {
  if (p.n < 2 || p.k < 1 || p.k > p.n - 1) return false;
  if (p.s <= 0 || p.s > p.k) return false;
  return p.t >= 0 && p.t <= Rational((p.k + 1) * (p.n - p.k));
}

nlohmann::ordered_json rational_json(const Rational& r) {
  nlohmann::ordered_json j;
  j["exact"] = to_string(r);
  j["value"] = to_double(r);
  return j;
}

}  // namespace

void validate(const BoundParams& p) {
  require(p.n >= 2, "n must be >= 2");
  require(p.k >= 1 && p.k <= p.n - 1, "k must satisfy 1 <= k <= n-1");
  require(p.s > 0 && p.s <= p.k, "s must satisfy 0 < s <= k");
  require(p.t >= 0 && p.t <= Rational((p.k + 1) * (p.n - p.k)),
          "t must satisfy 0 <= t <= (k+1)(n-k)");
}

int compute_k0(int n) {
  require(n >= 2, "compute_k0 requires n >= 2");
  // (7/3) 2^(k0-2) + k0 >= n  <=>  7 * 2^k0 + 12 k0 >= 12 n
  for (int k0 = 1;; ++k0) {
    const BigInt lhs = BigInt(7) * (BigInt(1) << k0) + 12 * k0;
    if (lhs >= BigInt(12) * n) return k0;
  }
}

BoundValue bound_spread_general(const BoundParams& p, int k0) {
  if (!params_ok(p) || k0 < 1) return std::nullopt;
  const int dim_grass = p.k * (p.n - p.k);
  if (p.k < k0 + 1 || p.s <= k0) return std::nullopt;
  if (p.t <= 0 || p.t > dim_grass) return std::nullopt;
  const Rational denom = ceil_r(p.s) - k0 + 1;
  return Rational(p.n - p.k) + p.s - (Rational(dim_grass) - p.t) / denom;
}

BoundValue bound_spread_main(const BoundParams& p) {
  if (p.n < 2) return std::nullopt;
  return bound_spread_general(p, compute_k0(p.n));
}

BoundValue bound_spread_hyperplane(int n, const Rational& s, const Rational& t) {
  if (n < 3 || s <= 1 || s > n - 1 || t <= 0 || t > n - 1) return std::nullopt;
  return 1 + s - (Rational(n - 1) - t) / ceil_r(s);
}

BoundValue bound_hera(const BoundParams& p) {
  if (!params_ok(p)) return std::nullopt;
  const Rational cs = ceil_r(p.s);
  return p.s + (p.t - (Rational(p.k) - cs) * (p.n - p.k)) / (cs + 1);
}

BoundValue bound_hkm(const BoundParams& p) {
  if (!params_ok(p)) return std::nullopt;
  return 2 * p.s + std::min(p.t, Rational(1)) - p.k;
}

BoundValue bound_dov(const BoundParams& p) {
  if (!params_ok(p) || p.k != p.n - 1) return std::nullopt;
  // Open at t = 1; the closed upper end t = n is kept.
  if (p.t <= 1 || p.t > p.n) return std::nullopt;
  const Rational n(p.n);
  return 2 * p.s + 2 - n - (p.t - 1) * (n - 1 - p.s) / (n - 1);
}

BoundValue bound_ren_wang(const BoundParams& p) {
  if (!params_ok(p) || p.n != 2 || p.k != 1 || p.t <= 0) return std::nullopt;
  return std::min({Rational(p.s + p.t), Rational((3 * p.s + p.t) / 2), Rational(p.s + 1)});
}

BoundValue bound_hyperplane_corollary(const BoundParams& p) {
  if (!params_ok(p) || p.n < 3 || p.k != p.n - 1 || p.s <= 1 || p.t <= 0) return std::nullopt;
  const Rational n1(p.n - 1);
  return 1 + p.s - (n1 - std::min(p.t, n1)) / ceil_r(p.s);
}

OberlinOutcome bound_oberlin(const BoundParams& p) {
  OberlinOutcome out;
  if (!params_ok(p) || p.s != p.k) return out;
  out.applicable = true;
  const int threshold = (p.k + 1) * (p.n - p.k) - p.k;
  if (p.t <= threshold) {
    out.value = Rational(2 * p.k - p.k * (p.n - p.k)) + p.t;
  } else {
    out.positive_measure = true;
  }
  return out;
}

const BoundEntry* BoundReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

BoundReport bound_survey(const BoundParams& p, bool include_spread) {
  validate(p);
  BoundReport report;
  report.params = p;

  auto add = [&](std::string name, std::string setting, const BoundValue& v) {
    report.entries.push_back({std::move(name), std::move(setting), v.has_value(), v, false});
  };

  const OberlinOutcome ob = bound_oberlin(p);
  report.entries.push_back(
      {"oberlin_falconer_mattila", "furstenberg", ob.applicable, ob.value, ob.positive_measure});
  add("hera_keleti_mathe", "furstenberg", bound_hkm(p));
  add("hera", "furstenberg", bound_hera(p));
  add("dabrowski_orponen_villa", "furstenberg", bound_dov(p));
  add("ren_wang", "furstenberg", bound_ren_wang(p));
  add("hyperplane_corollary", "furstenberg", bound_hyperplane_corollary(p));
  if (include_spread) {
    add("spread_main", "spread", bound_spread_main(p));
    add("spread_hyperplane", "spread",
        p.k == p.n - 1 ? bound_spread_hyperplane(p.n, p.s, p.t) : std::nullopt);
  }

  for (const auto& e : report.entries) {
    if (!e.applicable || !e.value) continue;
    if (!report.best_value || *e.value > *report.best_value) {
      report.best_value = e.value;
      report.best_name = e.name;
    }
  }
  return report;
}

FFBoundReport ff_bound_exponents(int n, int k, const Rational& s) {
  require(k >= 1 && k <= n - 1, "k must satisfy 1 <= k <= n-1");
  require(s > 0 && s <= k, "s must satisfy 0 < s <= k");
  const Rational half_n1 = Rational(n - 1) / 2;
  return {n * s, s + half_n1, Rational(n + 1) * s / 2 + half_n1, Rational(n - k) + s};
}

Rational alpha_affine_step(int n, int k, int k0, const Rational& t) {
  require(k0 >= 1 && k > k0, "alpha_affine_step requires k > k0 >= 1");
  return Rational((k - k0 + 1) * (n - k + k0) - k * (n - k)) + t;
}

nlohmann::ordered_json to_json(const BoundReport& report) {
  nlohmann::ordered_json j;
  j["n"] = report.params.n;
  j["k"] = report.params.k;
  j["s"] = rational_json(report.params.s);
  j["t"] = rational_json(report.params.t);
  auto entries = nlohmann::ordered_json::array();
  for (const auto& e : report.entries) {
    nlohmann::ordered_json je;
    je["name"] = e.name;
    je["setting"] = e.setting;
    je["applicable"] = e.applicable;
    if (e.positive_measure)
      je["value"] = "positive Lebesgue measure";
    else if (e.value)
      je["value"] = rational_json(*e.value);
    else
      je["value"] = nullptr;
    entries.push_back(std::move(je));
  }
  j["entries"] = std::move(entries);
  nlohmann::ordered_json best;
  if (report.best_value) {
    best["name"] = *report.best_name;
    best["value"] = rational_json(*report.best_value);
  }
  j["best"] = report.best_value ? best : nlohmann::ordered_json(nullptr);
  return j;
}

nlohmann::ordered_json to_json(const FFBoundReport& report) {
  nlohmann::ordered_json j;
  j["polynomial_method"] = rational_json(report.polynomial_method);
  j["pair_counting"] = rational_json(report.pair_counting);
  j["zhang_upper"] = rational_json(report.zhang_upper);
  j["ddl_lower"] = rational_json(report.ddl_lower);
  return j;
}

}  // namespace flatlab
