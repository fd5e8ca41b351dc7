#pragma once

// Command-line front end: named experiments writing CSV tables and JSON
// reports. Exit codes: 0 all assertions pass, 1 assertion failure, 2 usage or
// domain error.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracball/errors.hpp"
#include "fracball/field.hpp"
#include "fracball/frac_operator.hpp"
#include "fracball/geometry.hpp"
#include "fracball/kernels.hpp"
#include "fracball/mp_lab.hpp"
#include "fracball/quadrature.hpp"
#include "fracball/solvers.hpp"

namespace fracball::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kAssertionFailed = 1, kUsageError = 2 };

struct GlobalOptions {
  double tol_scale = 1.0;
  std::uint64_t seed = 0x5eed5eedULL;
};

/// FRACBALL_SEED (decimal or 0x-prefixed hex) overrides the default seed.
inline std::uint64_t seed_from_environment(std::uint64_t fallback) {
  const char* env = std::getenv("FRACBALL_SEED");
  if (!env || !*env) return fallback;
  std::string text(env);
  int base = 10;
  if (text.rfind("0x", 0) == 0 || text.rfind("0X", 0) == 0) {
    text = text.substr(2);
    base = 16;
  }
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, base);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw DomainError("FRACBALL_SEED is not an unsigned integer: " + std::string(env));
  return v;
}

/// Shortest round-trip decimal form; "nan" and "inf" spelled out.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Writes `content` to a sibling temporary file and renames it over `path`.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(const std::vector<double>& values) {
    if (values.size() != columns_.size()) throw Error("CsvTable: row width mismatch");
    rows_.push_back(values);
  }
  std::size_t rows() const noexcept { return rows_.size(); }

  std::string str() const {
    std::ostringstream os;
    os << "# schema_version: " << kSchemaVersion << '\n';
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
    os << '\n';
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
      os << '\n';
    }
    return os.str();
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

inline Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

/// Emits a JSON document to `path` (atomically) or to `out` when `path` is empty.
inline void emit_json(const Json& doc, const std::string& path, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (path.empty()) out << text;
  else write_atomic(path, text);
}

inline std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw DomainError("empty entry in list '" + text + "'");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw DomainError("not a number: '" + item + "'");
    }
    if (used != item.size()) throw DomainError("not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw DomainError("empty list");
  return out;
}

inline Json verdict_json(const MPVerdict& v) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["theorem"] = v.theorem;
  j["status"] = to_string(v.status);
  Json norms = Json::object();
  for (const auto& [k, val] : v.hypothesis_norms) norms[k] = number_or_null(val);
  j["hypothesis_norms"] = norms;
  Json th = Json::object();
  for (const auto& [k, val] : v.thresholds) th[k] = number_or_null(val);
  j["thresholds"] = th;
  j["interior_min"] = number_or_null(v.interior_min);
  j["interior_max"] = number_or_null(v.interior_max);
  j["boundary_min"] = number_or_null(v.boundary_min);
  j["residual_max"] = number_or_null(v.residual_max);
  j["hypotheses_hold"] = v.hypotheses_hold;
  j["below_thresholds"] = v.below_thresholds;
  j["conclusion_holds"] = v.conclusion_holds;
  j["hypothesis_violated"] = v.status == MPStatus::hypothesis_violated;
  j["quantitative_bound"] = v.quantitative_bound ? number_or_null(*v.quantitative_bound) : Json(nullptr);
  j["note"] = v.note;
  return j;
}

// ---------------------------------------------------------------------------
// Data catalog shared by `solve` and `mp --family fractional`.

inline std::vector<std::string> catalog_names() { return {"zero", "one", "two", "gaussian", "lorentzian"}; }

inline ScalarField catalog_field(const std::string& name) {
  if (name == "zero") return ScalarField::constant(0.0);
  if (name == "one") return ScalarField::constant(1.0);
  if (name == "two") return ScalarField::constant(2.0);
  if (name == "gaussian") {
    FieldTraits t;
    t.decay = DecayClass::power(-20.0);
    return ScalarField::radial([](double rho) { return std::exp(-rho * rho); }, t);
  }
  if (name == "lorentzian") {
    FieldTraits t;
    t.decay = DecayClass::power(-2.0);
    return ScalarField::radial([](double rho) { return 1.0 / (1.0 + rho * rho); }, t);
  }
  throw DomainError("unknown catalog entry '" + name + "'");
}

// ---------------------------------------------------------------------------
// counterexample

struct CounterexampleOptions {
  int n = 3;
  double alpha = 1.0;
  std::string eps_list = "0.1,0.01,0.001,0.0001";
  std::string csv_path;
  std::string json_path;
};

inline int cmd_counterexample(const CounterexampleOptions& o, const GlobalOptions& g, std::ostream& out,
                              std::ostream& err) {
  std::vector<double> eps;
  try {
    eps = parse_number_list(o.eps_list);
    for (double e : eps) CounterexampleParams{o.n, o.alpha, e}.validate();
    for (std::size_t i = 1; i < eps.size(); ++i)
      if (!(eps[i] < eps[i - 1])) throw DomainError("--eps-list must be strictly decreasing");
  } catch (const DomainError& e) {
    err << "counterexample: " << e.what() << '\n';
    return kUsageError;
  }
  SamplingSpec sampling;
  sampling.seed = g.seed;
  const QuadSpec q = QuadSpec{}.with_tol(1e-10 * g.tol_scale, 1e-8 * g.tol_scale);
  const auto rows = critical_sweep(o.n, o.alpha, eps, q, sampling);
  const auto summary = summarize_sweep(rows);

  CsvTable csv({"eps", "norm_c_Lnhalf", "u_at_origin", "boundary_min", "residual_max"});
  Json jrows = Json::array();
  for (const auto& r : rows) {
    Json jr;
    jr["eps"] = r.columns.front().second;
    if (r.error.empty()) {
      csv.add_row({r.get("eps"), r.get("norm_c_Lnhalf"), r.get("u_at_origin"), r.get("boundary_min"),
                   r.get("residual_max")});
      for (const auto& [k, v] : r.columns) jr[k] = number_or_null(v);
      Json checks = Json::object();
      for (const auto& [k, v] : r.checks) checks[k] = v;
      jr["checks"] = checks;
    } else {
      jr["error"] = r.error;
    }
    jrows.push_back(jr);
  }

  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "counterexample";
  doc["n"] = o.n;
  doc["alpha"] = o.alpha;
  doc["rows"] = jrows;
  Json inv = Json::array();
  auto invariant = [&](const char* name, bool passed, bool asserted) {
    inv.push_back(Json{{"name", name}, {"passed", passed}, {"asserted", asserted}});
  };
  invariant("rows_ok", summary.all_rows_ok, true);
  invariant("strictly_decreasing", summary.strictly_decreasing, true);
  invariant("strong_mp_failure_witness", summary.strong_mp_fails_everywhere, true);
  invariant("last_over_first_below_half", summary.halved, false);
  doc["invariants"] = inv;
  doc["last_over_first"] = number_or_null(summary.last_over_first);
  const bool pass = summary.all_rows_ok && summary.strictly_decreasing && summary.strong_mp_fails_everywhere;
  doc["passed"] = pass;
  if (summary.first_failing_row) doc["failing_row"] = *summary.first_failing_row;
  else doc["failing_row"] = nullptr;

  if (!o.csv_path.empty()) write_atomic(o.csv_path, csv.str());
  emit_json(doc, o.json_path, out);
  if (!pass) {
    err << "counterexample: assertion failed";
    if (summary.first_failing_row) err << " at row " << *summary.first_failing_row << " (eps = "
                                       << format_number(eps[*summary.first_failing_row]) << ")";
    err << '\n';
    return kAssertionFailed;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// kernels-check

struct KernelsCheckOptions {
  int n = 3;
  double s = 0.75;
  int pairs = 20;
  std::string json_path;
};

struct KernelGateReport {
  Json json;
  bool passed = false;
};

/// Poisson normalization at x in {0, r/2 e_1}; Green definition vs concise
/// form and 0 < G < Phi on seeded random interior pairs.
inline KernelGateReport kernel_gates(int n, const FracOrder& s, int pairs, std::uint64_t seed, double tol_scale) {
  const BallDomain dom(n, 1.0);
  const BallKernels K(dom, s);
  KernelGateReport rep;
  Json gates = Json::array();

  const double norm_tol = 1e-4 * tol_scale;
  double norm_worst = 0.0;
  Json norm_cases = Json::array();
  for (double a : {0.0, 0.5}) {
    const Point x = Point::unit(n, 0, a);
    QuadSpec q = QuadSpec{}.with_tol(1e-8 * tol_scale).with_endpoints(std::nullopt, s.value());
    q.axis = Point::unit(n, 0);
    const auto r = integrate_exterior(LayerFunction([&](const Point& y, double gap) { return K.poisson(x, y, gap); }),
                                      dom, q, Symmetry::axial);
    norm_worst = std::max(norm_worst, std::abs(r.value - 1.0));
    norm_cases.push_back(Json{{"x_norm", a}, {"integral", r.value}, {"discrepancy", std::abs(r.value - 1.0)}});
  }
  gates.push_back(Json{{"name", "poisson_normalization"},
                       {"tolerance", norm_tol},
                       {"max_discrepancy", norm_worst},
                       {"cases", norm_cases},
                       {"passed", norm_worst <= norm_tol}});

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto interior = [&]() { return (0.9 * std::pow(unif(rng), 1.0 / n)) * detail::random_direction(n, rng); };
  const double cross_tol = 1e-3 * tol_scale;
  double cross_worst = 0.0;
  bool bounds_ok = true;
  double min_g = std::numeric_limits<double>::infinity(), max_ratio = 0.0;
  for (int i = 0; i < pairs; ++i) {
    Point x = interior(), z = interior();
    while (distance(x, z) < 1e-3) z = interior();
    const double closed = K.green(x, z).value;
    const double def = K.green_definition(x, z, QuadSpec{}.with_tol(1e-7 * tol_scale)).value;
    cross_worst = std::max(cross_worst, std::abs(def / closed - 1.0));
    const double phi = K.fundamental(x, z);
    bounds_ok = bounds_ok && closed > 0.0 && closed < phi;
    min_g = std::min(min_g, closed);
    max_ratio = std::max(max_ratio, closed / phi);
  }
  gates.push_back(Json{{"name", "green_cross_representation"},
                       {"tolerance", cross_tol},
                       {"pairs", pairs},
                       {"max_relative_discrepancy", cross_worst},
                       {"passed", cross_worst <= cross_tol}});
  gates.push_back(Json{{"name", "green_bounds"},
                       {"pairs", pairs},
                       {"min_green", number_or_null(min_g)},
                       {"max_green_over_fundamental", max_ratio},
                       {"passed", bounds_ok}});

  rep.passed = true;
  for (const auto& gte : gates) rep.passed = rep.passed && gte["passed"].get<bool>();
  rep.json["schema_version"] = kSchemaVersion;
  rep.json["command"] = "kernels-check";
  rep.json["n"] = n;
  rep.json["s"] = s.value();
  rep.json["gates"] = gates;
  rep.json["passed"] = rep.passed;
  return rep;
}

inline int cmd_kernels_check(const KernelsCheckOptions& o, const GlobalOptions& g, std::ostream& out,
                             std::ostream& err) {
  std::optional<FracOrder> s;
  try {
    s.emplace(o.s);
    if (o.n < 1 || o.n > kMaxDim) throw DomainError("--n must lie in [1, " + std::to_string(kMaxDim) + "]");
    if (!(0.5 * o.n > o.s)) throw DomainError("n = 2s (or n < 2s) is excluded");
    if (o.pairs < 1) throw DomainError("--pairs must be positive");
  } catch (const DomainError& e) {
    err << "kernels-check: " << e.what() << '\n';
    return kUsageError;
  }
  const auto rep = kernel_gates(o.n, *s, o.pairs, g.seed, g.tol_scale);
  emit_json(rep.json, o.json_path, out);
  if (!rep.passed) {
    err << "kernels-check: gate failed\n";
    return kAssertionFailed;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// solve

struct SolveOptions {
  std::string spec_path;
  std::string csv_path;
  std::string json_path;
};

struct SolveProblem {
  std::string problem;  // "forced" or "dirichlet"
  std::string data;
  int n = 3;
  double s = 0.75;
  double radius = 1.0;
  std::vector<Point> points;
  bool residual = true;
  double residual_gate = 0.0;
};

/// {"problem", "data", "n", "s", "radius", "grid": {"radial_points", "max_radius"} or
///  {"points": [[...], ...]}, "residual"}.
inline SolveProblem parse_solve_problem(const Json& j) {
  SolveProblem p;
  if (!j.is_object()) throw DomainError("solve spec must be a JSON object");
  p.problem = j.value("problem", std::string("forced"));
  if (p.problem != "forced" && p.problem != "dirichlet")
    throw DomainError("problem must be 'forced' or 'dirichlet'");
  if (!j.contains("data")) throw DomainError("solve spec needs a 'data' catalog entry");
  p.data = j.at("data").get<std::string>();
  catalog_field(p.data);
  p.n = j.value("n", 3);
  p.s = j.value("s", 0.75);
  p.radius = j.value("radius", 1.0);
  p.residual = j.value("residual", true);
  FracOrder(p.s);
  if (p.n < 1 || p.n > kMaxDim || !(0.5 * p.n > p.s)) throw DomainError("need 1 <= n <= 8 and n > 2s");
  if (!(p.radius > 0.0)) throw DomainError("radius must be positive");
  const Json grid = j.value("grid", Json::object());
  if (grid.contains("points")) {
    for (const auto& pt : grid.at("points")) {
      if (!pt.is_array() || static_cast<int>(pt.size()) != p.n) throw DomainError("grid point has wrong dimension");
      Point x(p.n);
      for (int i = 0; i < p.n; ++i) x[i] = pt.at(static_cast<std::size_t>(i)).get<double>();
      p.points.push_back(x);
    }
  } else {
    const int count = grid.value("radial_points", 21);
    const double top = grid.value("max_radius", 0.95 * p.radius);
    if (count < 0) throw DomainError("radial_points must be non-negative");
    for (int k = 0; k < count; ++k)
      p.points.push_back(Point::unit(p.n, 0, count == 1 ? 0.0 : top * k / (count - 1)));
  }
  if (p.points.empty()) throw DomainError("empty grid");
  for (const Point& x : p.points)
    if (!(x.norm() < p.radius)) throw DomainError("grid points must lie in the open ball");
  p.residual_gate = p.problem == "forced" ? 5e-3 : 1e-3;
  return p;
}

inline int cmd_solve(const SolveOptions& o, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  SolveProblem p;
  try {
    std::ifstream in(o.spec_path);
    if (!in) throw DomainError("cannot read spec file '" + o.spec_path + "'");
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::exception& e) {
      throw DomainError(std::string("invalid JSON: ") + e.what());
    }
    p = parse_solve_problem(j);
  } catch (const DomainError& e) {
    err << "solve: " << e.what() << '\n';
    return kUsageError;
  } catch (const Json::exception& e) {
    err << "solve: " << e.what() << '\n';
    return kUsageError;
  }

  const FracOrder s(p.s);
  const ScalarField data = catalog_field(p.data);
  const QuadSpec solve_q = QuadSpec{}.with_tol(1e-11 * g.tol_scale);
  const bool forced = p.problem == "forced";
  const ScalarField u = forced ? solve_forced_fractional(data, p.radius, p.n, s, solve_q)
                               : solve_dirichlet_fractional(data, p.radius, p.n, s, solve_q);
  const ScalarField exterior = forced ? ScalarField::constant(0.0) : data;
  double surrogate_error = 0.0;
  std::optional<ScalarField> surrogate;
  if (p.residual) {
    const auto tab = tabulate_radial(u, exterior, p.radius, p.n, s, 1e-9 * g.tol_scale);
    surrogate = tab.field;
    surrogate_error = tab.interpolation_error;
  }

  std::vector<std::string> cols{"rho"};
  for (int i = 1; i <= p.n; ++i) cols.push_back("x_" + std::to_string(i));
  cols.push_back("u");
  cols.push_back("residual");
  CsvTable csv(cols);
  double residual_max = 0.0;
  const QuadSpec pv_q = QuadSpec{}.with_tol(1e-7 * g.tol_scale);
  for (const Point& x : p.points) {
    std::vector<double> row{x.norm()};
    for (int i = 0; i < p.n; ++i) row.push_back(x[i]);
    row.push_back(u(x));
    double res = std::numeric_limits<double>::quiet_NaN();
    if (surrogate) {
      const double lap = pv_fractional_laplacian(*surrogate, x, s, {}, pv_q).value;
      res = p.problem == "forced" ? lap - data(x) : lap;
      residual_max = std::max(residual_max, std::abs(res));
    }
    row.push_back(res);
    csv.add_row(row);
  }

  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "solve";
  doc["problem"] = p.problem;
  doc["data"] = p.data;
  doc["n"] = p.n;
  doc["s"] = p.s;
  doc["radius"] = p.radius;
  doc["points"] = p.points.size();
  doc["residual_computed"] = p.residual;
  doc["residual_max"] = p.residual ? Json(residual_max) : Json(nullptr);
  doc["residual_tolerance"] = p.residual_gate * g.tol_scale;
  doc["surrogate_error"] = surrogate_error;
  const bool pass = !p.residual || residual_max <= p.residual_gate * g.tol_scale;
  doc["passed"] = pass;
  // stdout carries the CSV when no CSV path is given, otherwise the JSON summary.
  if (!o.csv_path.empty()) write_atomic(o.csv_path, csv.str());
  if (!o.json_path.empty()) write_atomic(o.json_path, doc.dump(2) + "\n");
  if (o.csv_path.empty()) out << csv.str();
  else if (o.json_path.empty()) out << doc.dump(2) << '\n';
  if (!pass) {
    err << "solve: residual " << format_number(residual_max) << " exceeds "
        << format_number(p.residual_gate * g.tol_scale) << '\n';
    return kAssertionFailed;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// mp

struct MPOptions {
  std::string family = "manufactured-zero-order";
  std::string theorem = "weak-mp";
  std::string u = "paraboloid";
  int n = 3;
  double alpha = 1.0;
  double eps = 0.01;
  double p = 3.0;
  double scale = 1.0;
  double s = 0.75;
  std::string exterior = "one";
  std::string forcing;
  std::string drift = "none";
  std::string json_path;
};

inline int cmd_mp(const MPOptions& o, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  SamplingSpec sampling;
  sampling.seed = g.seed;
  sampling.tol = 1e-9 * g.tol_scale;
  const QuadSpec q = QuadSpec{}.with_tol(1e-8 * g.tol_scale, 1e-8 * g.tol_scale);
  if (o.theorem != "weak-mp" && o.theorem != "strong-mp") {
    err << "mp: --theorem must be weak-mp or strong-mp\n";
    return kUsageError;
  }
  if (!(o.scale > 0.0)) {
    err << "mp: --scale must be positive\n";
    return kUsageError;
  }
  const bool strong = o.theorem == "strong-mp";
  std::optional<MPVerdict> verdict;
  try {
    if (o.family == "counterexample") {
      const CounterexampleParams params{o.n, o.alpha, o.eps};
      params.validate();
      const BallDomain dom(o.n, 1.0);
      const auto thresholds = MPThresholds::sobolev(o.n);
      const ScalarField u = scaled(o.scale, counterexample_u(params));
      const ScalarField c = counterexample_c(params);
      const QuadSpec cq = q.with_endpoints(std::nullopt, 2.0 - 0.5 * o.n);
      if (strong) {
        const double m = u(Point::unit(o.n, 0, 1.0));
        verdict = strong_mp_bound(u, c, m, 0.5 * o.n, dom, thresholds, cq, sampling);
      } else {
        verdict = check_weak_mp(u, c, dom, thresholds, cq, sampling);
      }
    } else if (o.family == "manufactured-zero-order" || o.family == "manufactured-drift") {
      const bool drift = o.family == "manufactured-drift";
      if (o.n != 3) throw DomainError("manufactured families are defined in R^3");
      const auto corpus = manufactured_corpus();
      const ManufacturedFamily* fam = nullptr;
      for (const auto& f : corpus)
        if (f.name == o.u && f.drift == drift) fam = &f;
      if (!fam) {
        std::string names;
        for (const auto& f : corpus)
          if (f.drift == drift) names += (names.empty() ? "" : ", ") + f.name;
        throw DomainError("unknown u '" + o.u + "' for " + o.family + " (known: " + names + ")");
      }
      const BallDomain dom(3, 1.0);
      const auto thresholds = MPThresholds::sobolev(3);
      const ScalarField u = scaled(o.scale, fam->u());
      const auto st = detail::sample_extrema(u, make_samples(3, 1.0, sampling));
      if (!drift) {
        const ScalarField c = fam->c ? fam->c() : manufactured_zero_order(u);
        QuadSpec cq = q;
        if (c.has_log_profile()) cq = q.with_endpoints(std::nullopt, 0.5);
        verdict = strong ? strong_mp_bound(u, c, st.boundary_min, o.p, dom, thresholds, cq, sampling)
                         : check_weak_mp(u, c, dom, thresholds, cq, sampling);
      } else {
        std::optional<ManufacturedDrift> md;
        try {
          md.emplace(manufactured_drift(u, 3, 1.0, q));
        } catch (const AdmissibilityError& e) {
          Json doc;
          doc["schema_version"] = kSchemaVersion;
          doc["admissible"] = false;
          doc["reason"] = e.what();
          doc["norm_value"] = number_or_null(e.norm_value());
          doc["norm_converged"] = e.norm_converged();
          emit_json(doc, o.json_path, out);
          err << "mp: inadmissible drift: " << e.what() << '\n';
          return kUsageError;
        }
        const Symmetry sym = md->radial_magnitude ? Symmetry::radial : Symmetry::none;
        verdict = strong ? strong_mp_drift(u, md->b, st.boundary_min, dom, thresholds, q, sampling, sym)
                         : check_weak_mp(u, md->b, dom, thresholds, q, sampling, sym);
      }
    } else if (o.family == "fractional") {
      FractionalMPInput in;
      in.n = o.n;
      in.s = FracOrder(o.s);
      if (!o.exterior.empty()) in.exterior = scaled(o.scale, catalog_field(o.exterior));
      if (!o.forcing.empty()) in.forcing = scaled(o.scale, catalog_field(o.forcing));
      if (o.drift == "taper") {
        in.drift = VectorField([](const Point& x) { return x * (1.0 - x.norm()); });
        in.drift_magnitude_symmetry = Symmetry::radial;
      } else if (o.drift != "none") {
        throw DomainError("--drift must be none or taper");
      }
      SamplingSpec fs = sampling;
      fs.tol = 1e-5 * g.tol_scale;
      fs.radial_points = 50;
      fs.random_points = 200;
      verdict = fractional_mp_check(in, fs, QuadSpec{}.with_tol(1e-10 * g.tol_scale));
    } else {
      throw DomainError("unknown family '" + o.family +
                        "' (known: counterexample, manufactured-zero-order, manufactured-drift, fractional)");
    }
  } catch (const DomainError& e) {
    err << "mp: " << e.what() << '\n';
    return kUsageError;
  }
  Json doc = verdict_json(*verdict);
  doc["family"] = o.family;
  emit_json(doc, o.json_path, out);
  return verdict->status == MPStatus::fails ? kAssertionFailed : kOk;
}

// ---------------------------------------------------------------------------
// falsify

struct FalsifyOptions {
  std::string json_path;
};

inline int cmd_falsify(const FalsifyOptions& o, const GlobalOptions& g, std::ostream& out, std::ostream&) {
  SamplingSpec sampling;
  sampling.seed = g.seed;
  sampling.tol = 1e-9 * g.tol_scale;
  const auto corpus = manufactured_corpus();
  const auto rep = falsification_harness(corpus, MPThresholds::sobolev(3), sampling,
                                         QuadSpec{}.with_tol(1e-8 * g.tol_scale, 1e-8 * g.tol_scale));
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "falsify";
  doc["families"] = rep.families;
  doc["instances"] = rep.instances;
  doc["below_threshold"] = rep.below_threshold;
  doc["rejected"] = rep.rejected;
  doc["falsified"] = rep.falsified;
  Json entries = Json::array();
  for (const auto& e : rep.entries) {
    Json je;
    je["family"] = e.family;
    je["theorem"] = to_string(e.theorem);
    if (e.verdict) je["verdict"] = verdict_json(*e.verdict);
    else je["rejection"] = e.rejection;
    entries.push_back(je);
  }
  doc["entries"] = entries;
  doc["passed"] = rep.passed();
  emit_json(doc, o.json_path, out);
  return rep.passed() ? kOk : kAssertionFailed;
}

// ---------------------------------------------------------------------------
// entry point

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"fracball: maximum-principle experiments on the unit ball"};
  app.require_subcommand(1);
  GlobalOptions global;
  app.add_option("--tol-scale", global.tol_scale, "Multiply every tolerance by this factor")
      ->check(CLI::PositiveNumber);

  CounterexampleOptions ce;
  auto* c_ce = app.add_subcommand("counterexample", "Critical sweep of the logarithmic counterexample");
  c_ce->add_option("--n", ce.n, "Dimension (>= 3)");
  c_ce->add_option("--alpha", ce.alpha, "Exponent alpha > 0");
  c_ce->add_option("--eps-list", ce.eps_list, "Comma-separated decreasing eps values in (0, 1/e)");
  c_ce->add_option("--csv", ce.csv_path, "CSV output path");
  c_ce->add_option("--json", ce.json_path, "JSON summary path (stdout when omitted)");

  KernelsCheckOptions kc;
  auto* c_kc = app.add_subcommand("kernels-check", "Poisson and Green kernel consistency gates");
  c_kc->add_option("--n", kc.n, "Dimension");
  c_kc->add_option("--s", kc.s, "Order s in (0, 1)");
  c_kc->add_option("--pairs", kc.pairs, "Random interior pairs for the Green gates");
  c_kc->add_option("--json", kc.json_path, "JSON report path (stdout when omitted)");

  SolveOptions so;
  auto* c_so = app.add_subcommand("solve", "Solve a catalog problem on a grid and report residuals");
  c_so->add_option("--spec", so.spec_path, "Problem spec (JSON)")->required();
  c_so->add_option("--csv", so.csv_path, "CSV output path (stdout when omitted)");
  c_so->add_option("--json", so.json_path, "JSON summary path");

  MPOptions mp;
  auto* c_mp = app.add_subcommand("mp", "Check one maximum-principle instance");
  c_mp->add_option("--family", mp.family,
                   "counterexample | manufactured-zero-order | manufactured-drift | fractional");
  c_mp->add_option("--theorem", mp.theorem, "weak-mp | strong-mp");
  c_mp->add_option("--u", mp.u, "Manufactured family name");
  c_mp->add_option("--n", mp.n, "Dimension");
  c_mp->add_option("--alpha", mp.alpha, "Counterexample alpha");
  c_mp->add_option("--eps", mp.eps, "Counterexample eps");
  c_mp->add_option("--p", mp.p, "Integrability exponent of c for strong-mp");
  c_mp->add_option("--scale", mp.scale, "Multiply u (or the data) by this positive factor");
  c_mp->add_option("--s", mp.s, "Fractional order");
  c_mp->add_option("--exterior", mp.exterior, "Exterior data catalog entry (fractional)");
  c_mp->add_option("--forcing", mp.forcing, "Forcing catalog entry (fractional)");
  c_mp->add_option("--drift", mp.drift, "none | taper (fractional)");
  c_mp->add_option("--json", mp.json_path, "JSON verdict path (stdout when omitted)");

  FalsifyOptions fo;
  auto* c_fo = app.add_subcommand("falsify", "Run the manufactured corpus through the falsification harness");
  c_fo->add_option("--json", fo.json_path, "JSON report path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n' << app.help();
    return kUsageError;
  }

  try {
    global.seed = seed_from_environment(global.seed);
    if (c_ce->parsed()) return cmd_counterexample(ce, global, out, err);
    if (c_kc->parsed()) return cmd_kernels_check(kc, global, out, err);
    if (c_so->parsed()) return cmd_solve(so, global, out, err);
    if (c_mp->parsed()) return cmd_mp(mp, global, out, err);
    if (c_fo->parsed()) return cmd_falsify(fo, global, out, err);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kAssertionFailed;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace fracball::cli
