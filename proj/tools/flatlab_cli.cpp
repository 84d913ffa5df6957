// flatlab: batch runner for the library's experiments.
//
//   flatlab <group> <action> [--config PATH] [--seed U64] [--threads N]
//           [--out DIR] [--set key=value]...
//
// Exit codes: 0 ok, 1 unexpected error, 2 bad configuration, 3 budget
// exceeded, 4 invariant breach. Nothing is written unless the configuration
// validates; every output file is a pure function of (config, seed).

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "flatlab/bounds.hpp"
#include "flatlab/dimension.hpp"
#include "flatlab/duality.hpp"
#include "flatlab/finitefield.hpp"
#include "flatlab/grassmann.hpp"
#include "flatlab/maximal.hpp"
#include "flatlab/parallel.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace flatlab;

namespace {

enum class Kind { Int, Real, Rational, Bool, String, IntList, RealList, RationalList, IntMatrix };

struct Param {
  std::string key;
  Kind kind;
  json fallback;
  std::string help;
};

using Schema = std::vector<Param>;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Int: return "integer";
    case Kind::Real: return "real";
    case Kind::Rational: return "rational";
    case Kind::Bool: return "boolean";
    case Kind::String: return "string";
    case Kind::IntList: return "list of integers";
    case Kind::RealList: return "list of reals";
    case Kind::RationalList: return "list of rationals";
    case Kind::IntMatrix: return "list of integer lists";
  }
  return "?";
}

// Rationals are kept as canonical strings so reports stay exact.
std::string rational_text(const json& v) {
  if (v.is_string()) return to_string(parse_rational(v.get<std::string>()));
  if (v.is_number_integer()) return v.dump();
  if (v.is_number_float()) return to_string(parse_rational(v.dump()));
  throw ConfigError("expected a rational");
}

json normalize(const Param& p, const json& v) {
  auto fail = [&]() -> json {
    throw ConfigError("parameter '" + p.key + "' must be a " + kind_name(p.kind));
  };
  auto each = [&](auto&& check) {
    if (!v.is_array()) fail();
    json out = json::array();
    for (const auto& e : v) out.push_back(check(e));
    return out;
  };
  auto as_int = [&](const json& e) -> json { return e.is_number_integer() ? e : fail(); };
  auto as_real = [&](const json& e) -> json { return e.is_number() ? json(e.get<double>()) : fail(); };
  auto as_rational = [&](const json& e) -> json {
    try {
      return rational_text(e);
    } catch (const std::exception&) {
      return fail();
    }
  };
  switch (p.kind) {
    case Kind::Int: return as_int(v);
    case Kind::Real: return as_real(v);
    case Kind::Rational: return as_rational(v);
    case Kind::Bool: return v.is_boolean() ? v : fail();
    case Kind::String: return v.is_string() ? v : fail();
    case Kind::IntList: return each(as_int);
    case Kind::RealList: return each(as_real);
    case Kind::RationalList: return each(as_rational);
    case Kind::IntMatrix: {
      if (!v.is_array()) fail();
      json out = json::array();
      for (const auto& row : v) {
        if (!row.is_array()) fail();
        json r = json::array();
        for (const auto& e : row) r.push_back(as_int(e));
        out.push_back(std::move(r));
      }
      return out;
    }
  }
  return fail();
}

// --set values: JSON when it parses, otherwise a bare string; lists may be
// given as comma-separated items.
json parse_override(const Param& p, const std::string& text) {
  if (p.kind == Kind::String) return text;
  json parsed = json::parse(text, nullptr, false);
  if (!parsed.is_discarded()) {
    if ((p.kind == Kind::IntList || p.kind == Kind::RealList || p.kind == Kind::RationalList) &&
        !parsed.is_array())
      return json::array({parsed});
    return parsed;
  }
  if (p.kind == Kind::Rational) return text;
  if (p.kind == Kind::RationalList) {
    json out = json::array();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
  }
  throw ConfigError("cannot parse value '" + text + "' for '" + p.key + "'");
}

class Config {
 public:
  Config(const Schema& schema, const json& file, const std::vector<std::string>& overrides) {
    for (const auto& p : schema) values_[p.key] = p.fallback;
    if (!file.is_null()) {
      if (!file.is_object()) throw ConfigError("config file must hold a JSON object");
      for (const auto& [key, value] : file.items()) set(schema, key, value);
    }
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + o + "'");
      const std::string key = o.substr(0, eq);
      set(schema, key, parse_override(find(schema, key), o.substr(eq + 1)));
    }
    for (const auto& p : schema) resolved_[p.key] = normalize(p, values_[p.key]);
  }

  const json& resolved() const { return resolved_; }
  const json& at(const std::string& key) const { return resolved_.at(key); }
  long long integer(const std::string& key) const { return at(key).get<long long>(); }
  int small(const std::string& key) const {
    const long long v = integer(key);
    if (v < -1'000'000'000LL || v > 1'000'000'000LL) throw ConfigError("'" + key + "' out of range");
    return static_cast<int>(v);
  }
  double real(const std::string& key) const { return at(key).get<double>(); }
  Rational rational(const std::string& key) const { return parse_rational(at(key).get<std::string>()); }
  bool flag(const std::string& key) const { return at(key).get<bool>(); }
  std::string text(const std::string& key) const { return at(key).get<std::string>(); }

 private:
  static const Param& find(const Schema& schema, const std::string& key) {
    for (const auto& p : schema)
      if (p.key == key) return p;
    throw ConfigError("unknown parameter '" + key + "'");
  }
  void set(const Schema& schema, const std::string& key, const json& value) {
    find(schema, key);
    values_[key] = value;
  }

  std::map<std::string, json> values_;
  json resolved_ = json::object();
};

struct Output {
  std::vector<std::pair<std::string, std::string>> files;
  int exit_code = 0;
};

struct Context {
  const Config& config;
  Seed seed;
};

json header(const std::string& command, const Context& ctx) {
  json j;
  j["command"] = command;
  j["seed"] = ctx.seed;
  j["config"] = ctx.config.resolved();
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open input file '" + path + "'");
  return in;
}

std::vector<double> doubles(const json& arr) { return arr.get<std::vector<double>>(); }

// ---------------------------------------------------------------------------
// Commands

const Schema kBoundsEval = {
    {"n", Kind::IntList, json::array({7}), "ambient dimensions"},
    {"k", Kind::IntList, json::array({4}), "flat dimensions"},
    {"s", Kind::RationalList, json::array({"7/2"}), "slice dimensions"},
    {"t", Kind::RationalList, json::array({"12"}), "family dimensions"},
    {"spread", Kind::Bool, true, "include the spread-only bounds"},
};

Output bounds_eval(const Context& ctx) {
  const auto& c = ctx.config;
  json out = header("bounds eval", ctx);
  json reports = json::array(), skipped = json::array();
  std::ostringstream csv;
  const std::vector<std::string> names = {"oberlin_falconer_mattila", "hera_keleti_mathe", "hera",
                                          "dabrowski_orponen_villa",  "ren_wang",          "hyperplane_corollary",
                                          "spread_main",              "spread_hyperplane"};
  csv << "n,k,s,t";
  for (const auto& name : names) csv << ',' << name;
  csv << ",best_name,best_value\n";

  for (const auto& n : c.at("n"))
    for (const auto& k : c.at("k"))
      for (const auto& s : c.at("s"))
        for (const auto& t : c.at("t")) {
          BoundParams p{n.get<int>(), k.get<int>(), parse_rational(s.get<std::string>()),
                        parse_rational(t.get<std::string>())};
          try {
            validate(p);
          } catch (const ParameterError& e) {
            skipped.push_back({{"n", p.n}, {"k", p.k}, {"s", to_string(p.s)}, {"t", to_string(p.t)},
                               {"reason", e.what()}});
            continue;
          }
          const BoundReport r = bound_survey(p, c.flag("spread"));
          reports.push_back(to_json(r));
          csv << p.n << ',' << p.k << ',' << to_string(p.s) << ',' << to_string(p.t);
          for (const auto& name : names) {
            csv << ',';
            const BoundEntry* e = r.find(name);
            if (e && e->positive_measure)
              csv << "positive Lebesgue measure";
            else if (e && e->value)
              csv << to_string(*e->value);
          }
          csv << ',' << r.best_name.value_or("") << ',' << (r.best_value ? to_string(*r.best_value) : "") << '\n';
        }
  out["reports"] = std::move(reports);
  out["skipped"] = std::move(skipped);
  return {{{"bounds.json", dump(out)}, {"bounds.csv", csv.str()}}, 0};
}

const Schema kGrassmannVerify = {
    {"pairs", Kind::IntMatrix, json::array({json::array({3, 1}), json::array({4, 2}), json::array({5, 3})}),
     "(n, k) pairs"},
    {"samples", Kind::Int, 10000, "samples for the translation, rotation and rotation-norm suites"},
    {"subflat_samples", Kind::Int, 1000, "samples for the subflat suite (pairs with k >= 2, n <= 6)"},
    {"ball", Kind::Bool, true, "run the ball-measure scaling check"},
    {"ball_n", Kind::Int, 3, "ambient dimension for the ball check"},
    {"ball_k", Kind::Int, 1, "subspace dimension for the ball check"},
    {"ball_delta", Kind::Real, 0.2, "radius for the ball check"},
    {"ball_samples", Kind::Int, 1000000, "Monte Carlo samples per radius"},
};

json lemma_json(const LemmaCheck& r) {
  json j;
  j["name"] = r.name;
  j["n"] = r.n;
  j["k"] = r.k;
  j["samples"] = r.samples;
  j["violations"] = r.violations;
  j["max_ratio"] = r.max_ratio;
  j["constant"] = r.constant;
  j["passed"] = r.passed();
  return j;
}

Output grassmann_verify(const Context& ctx) {
  const auto& c = ctx.config;
  const int samples = c.small("samples"), sub = c.small("subflat_samples");
  if (samples < 1 || sub < 1) throw ConfigError("sample counts must be positive");
  json out = header("grassmann verify", ctx);
  json checks = json::array();
  bool ok = true;
  std::uint64_t stream = 0;
  auto record = [&](const LemmaCheck& r) {
    ok = ok && r.passed();
    checks.push_back(lemma_json(r));
  };
  for (const auto& pair : c.at("pairs")) {
    if (pair.size() != 2) throw ConfigError("each entry of 'pairs' must be [n, k]");
    const int n = pair[0].get<int>(), k = pair[1].get<int>();
    if (n < 2 || n > kMaxAmbientDim || k < 1 || k > n - 1) throw ConfigError("pair out of range");
    record(check_translation_lemma(n, k, samples, derive_seed(ctx.seed, stream++)));
    record(check_rotation_lemma(n, k, samples, derive_seed(ctx.seed, stream++)));
    record(check_min_rotation_norm(n, k, samples, derive_seed(ctx.seed, stream++)));
    if (k >= 2 && n <= 6) record(check_subflat_lemma(n, k, sub, derive_seed(ctx.seed, stream++)));
  }
  if (c.flag("ball"))
    record(check_ball_scaling(c.small("ball_n"), c.small("ball_k"), c.real("ball_delta"), c.small("ball_samples"),
                              derive_seed(ctx.seed, stream++)));
  out["checks"] = std::move(checks);
  out["all_passed"] = ok;
  return {{{"grassmann.json", dump(out)}}, ok ? 0 : 4};
}

const Schema kDualitySpreadify = {
    {"points", Kind::String, "", "CSV of points (x0..); empty uses the built-in example"},
    {"hyperplanes", Kind::String, "", "CSV of graph hyperplanes (a0..,c); empty uses the built-in example"},
    {"example", Kind::String, "horizontal_lines", "horizontal_lines or sloped_lines"},
    {"lines", Kind::Int, 1000, "lines in the built-in example"},
    {"points_per_line", Kind::Int, 5, "points per line in the built-in example"},
    {"l_min", Kind::Int, 3, "fit range start"},
    {"l_max", Kind::Int, 8, "fit range end"},
    {"ndirs", Kind::Int, 32, "candidate directions"},
    {"incidence_tol", Kind::Real, 1e-6, "incidence tolerance"},
};

Output duality_spreadify(const Context& ctx) {
  const auto& c = ctx.config;
  IncidenceExample input;
  const bool from_files = !c.text("points").empty() || !c.text("hyperplanes").empty();
  if (from_files) {
    if (c.text("points").empty() || c.text("hyperplanes").empty())
      throw ConfigError("'points' and 'hyperplanes' must be given together");
    auto pin = open_input(c.text("points"));
    auto hin = open_input(c.text("hyperplanes"));
    input.points = read_points_csv(pin);
    input.hyperplanes = read_hyperplanes_csv(hin);
  } else if (c.text("example") == "horizontal_lines") {
    input = horizontal_lines_example(c.small("lines"), c.small("points_per_line"), derive_seed(ctx.seed, 100));
  } else if (c.text("example") == "sloped_lines") {
    input = sloped_lines_example(c.small("lines"), c.small("points_per_line"), derive_seed(ctx.seed, 100));
  } else {
    throw ConfigError("unknown example '" + c.text("example") + "'");
  }

  const SpreadifyResult r = spreadify(input.points, input.hyperplanes, c.small("l_min"), c.small("l_max"),
                                      derive_seed(ctx.seed, 0), c.small("ndirs"), c.real("incidence_tol"));
  json out = header("duality spreadify", ctx);
  out["report"] = to_json(r.report);

  std::ostringstream points, flats;
  if (!r.points.empty()) write_points_csv(r.points, points);
  const int n = input.hyperplanes.front().ambient_dim();
  for (int j = 0; j < n; ++j) flats << 'n' << j << ',';
  flats << "offset\n";
  flats.precision(17);
  for (const auto& w : r.flats) {
    const Vector nu = w.direction().complement().basis().col(0);
    for (int j = 0; j < n; ++j) flats << nu(j) << ',';
    flats << nu.dot(w.offset()) << '\n';
  }
  const int code = r.report.incidences_preserved() ? 0 : 4;
  return {{{"spreadify.json", dump(out)}, {"mapped_points.csv", points.str()}, {"mapped_flats.csv", flats.str()}},
          code};
}

const Schema kDimensionEstimate = {
    {"input", Kind::String, "", "point CSV (x0..) or GridSet binary (.gset)"},
    {"l_min", Kind::Int, 2, "fit range start"},
    {"l_max", Kind::Int, 0, "fit range end; 0 = the grid level (.gset) or 8 (point clouds, rasterization level)"},
};

Output dimension_estimate(const Context& ctx) {
  const auto& c = ctx.config;
  const std::string path = c.text("input");
  if (path.empty()) throw ConfigError("'input' is required");
  auto in = open_input(path);
  DimensionEstimate e;
  const int l_max = c.small("l_max");
  if (fs::path(path).extension() == ".gset") {
    const GridSet g = read_binary(in);
    e = estimate_dimension(g, c.small("l_min"), l_max > 0 ? l_max : g.level());
  } else {
    e = point_cloud_dimension(read_points_csv(in), c.small("l_min"), l_max > 0 ? l_max : 8);
  }
  json out = header("dimension estimate", ctx);
  out["estimate"] = to_json(e);
  return {{{"dimension.json", dump(out)}}, 0};
}

const Schema kDimensionConstruct = {
    {"kind", Kind::String, "cantor", "cantor, sharp_hyperplane or slicing_product"},
    {"n", Kind::Int, 1, "ambient dimension"},
    {"k", Kind::Int, 1, "Cantor coordinates (slicing_product)"},
    {"base", Kind::Int, 3, "digit base (cantor)"},
    {"keep", Kind::IntMatrix, json::array({json::array({0, 2})}), "kept digits, one list or one per axis (cantor)"},
    {"depth", Kind::Int, 8, "construction depth"},
    {"s", Kind::Real, 1.5, "target dimension (sharp_hyperplane, slicing_product)"},
    {"family_size", Kind::Int, 1000, "hyperplanes in the family (sharp_hyperplane)"},
    {"l_min", Kind::Int, 0, "fit range start (0 = default)"},
    {"l_max", Kind::Int, 0, "fit range end (0 = default)"},
};

Output dimension_construct(const Context& ctx) {
  const auto& c = ctx.config;
  const std::string kind = c.text("kind");
  json out = header("dimension construct", ctx);
  GridSet set(1, 0);
  if (kind == "cantor") {
    std::vector<DigitPattern> keep;
    for (const auto& row : c.at("keep")) keep.push_back(row.get<DigitPattern>());
    set = cantor_grid(c.small("n"), c.small("base"), keep, c.small("depth"));
    out["pattern_dimension"] = pattern_dimension(c.small("base"), keep);
  } else if (kind == "sharp_hyperplane") {
    const SharpHyperplaneExample ex =
        sharp_hyperplane_example(c.small("n"), c.real("s"), c.small("depth"), c.small("family_size"),
                                 derive_seed(ctx.seed, 0));
    set = ex.set;
    out["s_target"] = ex.s_target;
    out["s_achieved"] = ex.s_achieved;
    out["t"] = ex.t;
    std::vector<Subspace> dirs;
    for (const auto& w : ex.family.flats) dirs.push_back(w.direction());
    const int top = std::max(3, static_cast<int>(std::floor(std::log2(static_cast<double>(dirs.size())))) - 2);
    out["family_dimension"] = to_json(family_dimension(dirs, 2, top));
    const auto sharp = bound_spread_hyperplane(ex.set.dim(), exact_rational(ex.s_achieved), Rational(ex.t));
    out["spread_hyperplane_bound"] = sharp ? json(to_string(*sharp)) : json(nullptr);
    out["sharp"] = sharp.has_value() && *sharp == exact_rational(ex.s_achieved);
  } else if (kind == "slicing_product") {
    const SlicingProductExample ex = slicing_product_example(c.small("n"), c.small("k"), c.real("s"), c.small("depth"));
    set = ex.set;
    out["s_achieved"] = ex.s_achieved;
    out["expected_dimension"] = ex.expected_dimension;
  } else {
    throw ConfigError("unknown construction '" + kind + "'");
  }
  const int lo = c.small("l_min"), hi = c.small("l_max");
  out["cells"] = set.size();
  out["level"] = set.level();
  out["estimate"] = to_json(lo == 0 && hi == 0 ? estimate_dimension(set) : estimate_dimension(set, lo, hi));
  std::ostringstream bin;
  write_binary(set, bin);
  return {{{"construct.json", dump(out)}, {"set.gset", bin.str()}}, 0};
}

SearchMode parse_mode(const std::string& mode) {
  if (mode == "auto") return SearchMode::Auto;
  if (mode == "exhaustive") return SearchMode::Exhaustive;
  if (mode == "branch_and_bound") return SearchMode::BranchAndBound;
  throw ConfigError("unknown search mode '" + mode + "'");
}

const Schema kFFVerify = {
    {"q", Kind::Int, 3, "field size (prime)"},
    {"n", Kind::Int, 2, "dimension"},
    {"k", Kind::Int, 1, "flat dimension"},
    {"check", Kind::String, "kakeya", "kakeya, spread or pigeonhole"},
    {"set", Kind::String, "", "CSV of points (x0..); empty uses all of F_q^n"},
    {"m", Kind::Int, 0, "points required per direction (spread; 0 = q^k)"},
    {"directions", Kind::Int, 0, "directions required (spread; 0 = all)"},
};

Output ff_verify(const Context& ctx) {
  const auto& c = ctx.config;
  const int q = c.small("q"), n = c.small("n"), k = c.small("k");
  FFSet f(q, n);
  if (c.text("set").empty()) {
    f = FFSet::whole_space(q, n);
  } else {
    auto in = open_input(c.text("set"));
    f = read_ff_csv(in, q);
    if (f.n() != n) throw ConfigError("set dimension does not match n");
  }
  const auto dirs = ff_directions(q, n, k);
  json out = header("ff verify", ctx);
  out["set_size"] = f.size();
  out["directions"] = dirs.size();
  out["gaussian_binomial"] = gaussian_binomial(n, k, q).str();
  json maxima = json::array();
  for (const auto& d : dirs) maxima.push_back(ff_coset_profile(f, d).max_count);
  out["max_coset_counts"] = std::move(maxima);
  const std::string check = c.text("check");
  bool result = false;
  if (check == "kakeya") {
    if (k != 1) throw ConfigError("the kakeya check uses k = 1");
    result = ff_is_kakeya(f);
  } else if (check == "spread") {
    const int m = c.small("m") > 0 ? c.small("m") : static_cast<int>(std::lround(std::pow(q, k)));
    const int need = c.small("directions") > 0 ? c.small("directions") : static_cast<int>(dirs.size());
    result = ff_is_spread_furstenberg(f, k, m, need);
  } else if (check == "pigeonhole") {
    result = ff_pigeonhole_verify(f, k);
    // Pigeonhole is a theorem: a failure is a bug.
    out["check"] = check;
    out["result"] = result;
    return {{{"ff_verify.json", dump(out)}}, result ? 0 : 4};
  } else {
    throw ConfigError("unknown check '" + check + "'");
  }
  out["check"] = check;
  out["result"] = result;
  return {{{"ff_verify.json", dump(out)}}, 0};
}

const Schema kFFSearch = {
    {"q", Kind::Int, 2, "field size (prime)"},
    {"n", Kind::Int, 2, "dimension"},
    {"k", Kind::Int, 1, "flat dimension"},
    {"m", Kind::Int, 0, "points required per direction (0 = q^k, the Kakeya condition)"},
    {"mode", Kind::String, "auto", "auto, exhaustive or branch_and_bound"},
    {"max_nodes", Kind::Int, 200000000, "search budget in nodes"},
};

Output ff_search(const Context& ctx) {
  const auto& c = ctx.config;
  const int q = c.small("q"), n = c.small("n"), k = c.small("k");
  const int m = c.small("m") > 0 ? c.small("m") : static_cast<int>(std::lround(std::pow(q, k)));
  if (c.integer("max_nodes") < 1) throw ConfigError("max_nodes must be positive");
  const SearchResult r =
      ff_min_spread(q, n, k, m, parse_mode(c.text("mode")), static_cast<std::uint64_t>(c.integer("max_nodes")));
  std::cerr << "ff search: wall_time " << r.wall_time << " s\n";
  json out = header("ff search", ctx);
  out["result"] = to_json(r, false);
  out["is_kakeya"] = k == 1 && m == q ? json(ff_is_kakeya(r.witness)) : json(nullptr);
  std::ostringstream csv;
  write_csv(r.witness, csv);
  return {{{"ff_search.json", dump(out)}, {"witness.csv", csv.str()}}, 0};
}

const Schema kMaximalScan = {
    {"ntubes", Kind::Int, 50, "random tubes in the union"},
    {"p", Kind::Real, 2.0, "Lebesgue exponent"},
    {"deltas", Kind::RealList, json::array({0.0625, 0.03125, 0.015625, 0.0078125}), "tube radii"},
    {"ndirs", Kind::Int, 16, "Haar directions per radius"},
};

Output maximal_scan(const Context& ctx) {
  const auto& c = ctx.config;
  const auto rows = maximal_scaling(c.small("ntubes"), c.real("p"), doubles(c.at("deltas")), c.small("ndirs"),
                                    derive_seed(ctx.seed, 0));
  json out = header("maximal scan", ctx);
  json table = json::array();
  for (const auto& r : rows) table.push_back({{"delta", r.delta}, {"level", r.level}, {"norm", r.norm}});
  out["rows"] = std::move(table);
  std::ostringstream csv, script;
  write_scaling_csv(rows, csv);
  write_scaling_plot_script("scaling.csv", script);
  return {{{"maximal.json", dump(out)}, {"scaling.csv", csv.str()}, {"plot_scaling.py", script.str()}}, 0};
}

struct Command {
  std::string group;
  std::string action;
  const Schema* schema;
  Output (*run)(const Context&);
};

const std::vector<Command> kCommands = {
    {"bounds", "eval", &kBoundsEval, bounds_eval},
    {"grassmann", "verify", &kGrassmannVerify, grassmann_verify},
    {"duality", "spreadify", &kDualitySpreadify, duality_spreadify},
    {"dimension", "estimate", &kDimensionEstimate, dimension_estimate},
    {"dimension", "construct", &kDimensionConstruct, dimension_construct},
    {"ff", "verify", &kFFVerify, ff_verify},
    {"ff", "search", &kFFSearch, ff_search},
    {"maximal", "scan", &kMaximalScan, maximal_scan},
};

std::string command_list() {
  std::string s;
  for (const auto& c : kCommands) s += "  " + c.group + " " + c.action + "\n";
  return s;
}

std::string schema_help(const Command& cmd) {
  std::ostringstream os;
  os << cmd.group << ' ' << cmd.action << " parameters:\n";
  for (const auto& p : *cmd.schema)
    os << "  " << p.key << " (" << kind_name(p.kind) << ", default " << p.fallback.dump() << "): " << p.help << '\n';
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flatlab: Furstenberg-type bounds, Grassmannian geometry and discrete experiments"};
  std::string group, action, config_path, out_dir = "flatlab_out";
  Seed seed = 0;
  int threads = 1;
  bool describe = false;
  std::vector<std::string> overrides;
  app.add_option("group", group, "command group")->required();
  app.add_option("action", action, "command action")->required();
  app.add_option("--config", config_path, "JSON object of parameters");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 256));
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--set", overrides, "parameter override key=value (repeatable)");
  app.add_flag("--describe", describe, "print the parameter schema and exit");
  app.footer("commands:\n" + command_list());
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const Command* cmd = nullptr;
  for (const auto& c : kCommands)
    if (c.group == group && c.action == action) cmd = &c;
  if (!cmd) {
    std::cerr << "unknown command '" << group << ' ' << action << "'; available:\n" << command_list();
    return 2;
  }
  if (describe) {
    std::cout << schema_help(*cmd);
    return 0;
  }

  Output output;
  try {
    json file;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot read config '" + config_path + "'");
      file = json::parse(in, nullptr, false);
      if (file.is_discarded()) throw ConfigError("config '" + config_path + "' is not valid JSON");
    }
    const Config config(*cmd->schema, file, overrides);
    set_thread_count(threads);
    output = cmd->run({config, seed});
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return 2;
  } catch (const BudgetExceededError& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return 3;
  } catch (const InvariantError& e) {
    std::cerr << "invariant breach: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    fs::create_directories(out_dir);
    for (const auto& [name, content] : output.files) {
      std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
      f << content;
      if (!f) throw std::runtime_error("failed to write " + name);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  if (output.exit_code == 4) std::cerr << "invariant breach: see the report in " << out_dir << '\n';
  return output.exit_code;
}
