// Acceptance gates 1-10. Prints one PASS/FAIL line per criterion with the
// measured quantities and exits non-zero when any criterion fails.
//
//   ./acceptance            all criteria
//   ./acceptance 2 7        selected criteria

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fracball/frac_operator.hpp"
#include "fracball/kernels.hpp"
#include "fracball/mp_lab.hpp"
#include "fracball/solvers.hpp"

using namespace fracball;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Point random_interior(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return (radius * std::cbrt(unif(rng))) * detail::random_direction(3, rng);
}

// 1. -Delta u + c u = 0 on 50 radii, closed forms and fourth-order differences.
Outcome counterexample_identity() {
  double worst_closed = 0.0, worst_fd = 0.0;
  for (int n : {3, 4})
    for (double alpha : {0.5, 1.0, 2.0})
      for (double eps : {0.1, 0.01}) {
        const auto r = counterexample_residuals({n, alpha, eps}, 50);
        worst_closed = std::max(worst_closed, r.closed_form_max);
        worst_fd = std::max(worst_fd, r.finite_difference_max);
      }
  return {worst_closed <= 1e-8 && worst_fd <= 1e-4,
          fmt("max closed-form residual %.3g (<= 1e-8), max finite-difference residual %.3g (<= 1e-4)", worst_closed,
              worst_fd)};
}

std::vector<ExperimentRecord> sweep_rows() {
  return critical_sweep(3, 1.0, {1e-1, 1e-2, 1e-3, 1e-4}, QuadSpec{}.with_tol(1e-10, 1e-8));
}

// 2. ||c_eps||_{L^{3/2}(B_1)} strictly decreasing, last/first < 1/2, relative error <= 1e-6.
Outcome critical_norm_decay() {
  const auto rows = sweep_rows();
  const auto sum = summarize_sweep(rows);
  double worst_rel = 0.0;
  std::string norms;
  for (const auto& r : rows) {
    if (!r.error.empty()) return {false, "row error: " + r.error};
    worst_rel = std::max(worst_rel, r.get("norm_error") / r.get("norm_c_Lnhalf"));
    norms += fmt("%s%.6f", norms.empty() ? "" : ", ", r.get("norm_c_Lnhalf"));
  }
  const bool pass = sum.strictly_decreasing && sum.halved && worst_rel <= 1e-6;
  return {pass, fmt("norms [%s], strictly decreasing %s, last/first %.4f (< 0.5), max relative error %.2g (<= 1e-6)",
                    norms.c_str(), sum.strictly_decreasing ? "yes" : "no", sum.last_over_first, worst_rel)};
}

// 3. u_eps(0) = 0, boundary value (-ln eps)^{-alpha} > 0, u >= 0 on the sampling grid.
Outcome strong_mp_witness() {
  const auto rows = sweep_rows();
  bool pass = true;
  double min_boundary = std::numeric_limits<double>::infinity(), min_interior = min_boundary;
  for (const auto& r : rows) {
    if (!r.error.empty()) return {false, "row error: " + r.error};
    const double eps = r.get("eps");
    pass = pass && r.get("u_at_origin") == 0.0;
    pass = pass && r.get("boundary_min") > 0.0 &&
           std::abs(r.get("boundary_min") - 1.0 / -std::log(eps)) <= 1e-14;
    pass = pass && r.get("interior_min") >= -1e-9;
    min_boundary = std::min(min_boundary, r.get("boundary_min"));
    min_interior = std::min(min_interior, r.get("interior_min"));
  }
  return {pass, fmt("u(0) = 0 on all %zu rows, min boundary value %.6f > 0, min sampled interior value %.3g >= 0",
                    rows.size(), min_boundary, min_interior)};
}

// 4. \int_{|y|>1} P_1(x, y) dy = 1.
Outcome poisson_normalization() {
  double worst = 0.0;
  for (double s : {0.4, 0.75}) {
    const BallKernels K(BallDomain(3, 1.0), FracOrder(s));
    for (const Point& x : {Point{0.0, 0.0, 0.0}, Point{0.5, 0.0, 0.0}}) {
      QuadSpec q = QuadSpec{}.with_tol(1e-8).with_endpoints(std::nullopt, s);
      q.axis = Point{1.0, 0.0, 0.0};
      const auto r = integrate_exterior(
          LayerFunction([&](const Point& y, double gap) { return K.poisson(x, y, gap); }), K.domain(), q,
          Symmetry::axial);
      worst = std::max(worst, std::abs(r.value - 1.0));
    }
  }
  return {worst <= 1e-4, fmt("max |integral - 1| = %.3g over x in {0, (0.5,0,0)}, s in {0.4, 0.75} (<= 1e-4)", worst)};
}

// 5. Green function: definition vs concise form on 20 random pairs; 0 < G < Phi.
Outcome green_cross_representation() {
  double worst = 0.0, worst_ratio = 0.0;
  bool bounds = true;
  std::mt19937_64 rng(2024);
  for (double s : {0.4, 0.75}) {
    const BallKernels K(BallDomain(3, 1.0), FracOrder(s));
    for (int i = 0; i < 20; ++i) {
      const Point x = random_interior(rng, 0.95), z = random_interior(rng, 0.95);
      const double closed = K.green(x, z).value;
      const double def = K.green_definition(x, z, QuadSpec{}.with_tol(1e-7)).value;
      worst = std::max(worst, std::abs(def / closed - 1.0));
      const double phi = K.fundamental(x, z);
      bounds = bounds && closed > 0.0 && closed < phi;
      worst_ratio = std::max(worst_ratio, closed / phi);
    }
  }
  return {worst <= 1e-3 && bounds,
          fmt("max relative discrepancy %.3g (<= 1e-3); 0 < G < Phi on all 40 pairs: %s (max G/Phi %.4f)", worst,
              bounds ? "yes" : "no", worst_ratio)};
}

// 6. (-Delta)^s u_g = 0 at 5 interior points for a Gaussian g; (-Delta)^s u_h = 1 at the centre for h = 1.
Outcome solve_then_apply() {
  const int n = 3;
  const FracOrder s(0.75);
  FieldTraits t;
  t.decay = DecayClass::power(-20.0);
  const ScalarField g = ScalarField::radial([](double rho) { return std::exp(-rho * rho); }, t);
  const auto ug = solve_dirichlet_fractional(g, 1.0, n, s, QuadSpec{}.with_tol(1e-11));
  const auto tab_g = tabulate_radial(ug, g, 1.0, n, s);
  double worst_g = 0.0;
  for (const Point& x : {Point{0.0, 0.0, 0.0}, Point{0.3, 0.0, 0.0}, Point{0.0, -0.5, 0.0}, Point{0.2, 0.2, 0.4},
                         Point{0.0, 0.0, 0.8}}) {
    worst_g = std::max(worst_g, std::abs(pv_fractional_laplacian(tab_g.field, x, s, {}, QuadSpec{}.with_tol(1e-7)).value));
  }
  const auto uh = solve_forced_fractional(ScalarField::constant(1.0), 1.0, n, s, QuadSpec{}.with_tol(1e-11));
  const auto tab_h = tabulate_radial(uh, ScalarField::constant(0.0), 1.0, n, s);
  const double centre =
      pv_fractional_laplacian(tab_h.field, Point{0.0, 0.0, 0.0}, s, {}, QuadSpec{}.with_tol(1e-7)).value;
  const bool pass = worst_g <= 1e-3 && std::abs(centre - 1.0) <= 5e-3;
  return {pass, fmt("max |(-Delta)^s u_g| = %.3g at 5 points (<= 1e-3); |(-Delta)^s u_h(0) - 1| = %.3g (<= 5e-3); "
                    "surrogate errors %.2g, %.2g",
                    worst_g, std::abs(centre - 1.0), tab_g.interpolation_error, tab_h.interpolation_error)};
}

// 7. c^+ = lambda: ||f||_inf = lambda / 6 and u >= m (1 - lambda / 6) on the grid.
Outcome strong_bound() {
  const BallDomain dom(3, 1.0);
  bool pass = true;
  std::string detail;
  for (double lambda : {0.6, 3.0}) {
    const double k = std::sqrt(lambda);
    auto prof = [k](double rho) { return rho == 0.0 ? 1.0 : std::sinh(k * rho) / (k * rho); };
    const ScalarField u = ScalarField::radial(prof).with_laplacian(
        [prof, lambda](const Point& x) { return lambda * prof(x.norm()); });
    const ScalarField c = ScalarField::constant(lambda);
    const double m = std::sinh(k) / k;
    const auto v = strong_mp_bound(u, c, m, 3.0, dom, MPThresholds::sobolev(3), QuadSpec{}.with_tol(1e-9, 1e-9));
    const double fsup = v.hypothesis_norms.at("f_sup");
    const bool ok = std::abs(fsup - lambda / 6.0) <= 1e-10 && v.conclusion_holds &&
                    v.interior_min >= m * (1.0 - lambda / 6.0) - 1e-9;
    pass = pass && ok;
    detail += fmt("%slambda=%.1f: |f_sup - lambda/6| = %.2g, min u = %.6f >= bound %.6f", detail.empty() ? "" : "; ",
                  lambda, std::abs(fsup - lambda / 6.0), v.interior_min, m * (1.0 - lambda / 6.0));
  }
  return {pass, detail};
}

// 8. (-Delta)^s of the mollified forced solution (h = -1) stays <= 1e-2 on B_0.9.
Outcome mollification_sign() {
  const auto chk = mollification_sign_check(3, FracOrder(0.75), 0.05, 10, 1e-2);
  return {chk.holds, fmt("max (-Delta)^s w_eps over 10 points = %.5f (<= 1e-2), surrogate error %.2g", chk.max_value,
                         chk.surrogate_error)};
}

// 9. Truncation inequality with 5 nonnegative test functions, s = 0.75.
Outcome truncation_inequality() {
  FieldTraits t;
  t.decay = DecayClass::bounded();
  const ScalarField u =
      ScalarField::radial([](double rho) { return 1.0 - 2.0 * std::exp(-rho * rho / 0.36); }, t)
          .with_gradient([](const Point& x) { return x * (4.0 / 0.36 * std::exp(-x.norm2() / 0.36)); });
  const VectorField b = VectorField([](const Point& x) { return Point{1.0 + x[1], 0.5 * x[0] * x[2], -0.3}; })
                            .with_divergence([](const Point&) { return 0.0; });
  const ScalarField c([](const Point& x) { return 0.5 + x[0] * x[0]; });
  const std::vector<TestFunction> tests{{Point{0.0, 0.0, 0.0}, 0.6, 1.0},
                                        {Point{0.2, -0.1, 0.0}, 0.3, 2.0},
                                        {Point{-0.3, 0.2, 0.1}, 0.4, 1.5},
                                        {Point{0.0, 0.0, 0.5}, 0.35, 1.0},
                                        {Point{0.1, 0.3, -0.2}, 0.5, 0.7}};
  const auto rep = truncation_weak_form_check(u, b, c, tests, FracOrder(0.75));
  double min_margin = std::numeric_limits<double>::infinity();
  for (const auto& term : rep.terms) min_margin = std::min(min_margin, term.difference + term.error_budget);
  return {rep.all_hold && rep.terms.size() == 5,
          fmt("%zu test functions, min (difference + budget) = %.3g >= 0", rep.terms.size(), min_margin)};
}

// 10. No below-threshold instance with a failed conclusion across the corpus.
Outcome falsification() {
  const auto corpus = manufactured_corpus();
  const auto rep = falsification_harness(corpus, MPThresholds::sobolev(3));
  return {rep.passed() && corpus.size() >= 20,
          fmt("%zu families, %zu instances, %zu below thresholds, %zu rejected as inadmissible, %zu falsified",
              rep.families, rep.instances, rep.below_threshold, rep.rejected, rep.falsified)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"counterexample identity", counterexample_identity},
      {"critical norm decay", critical_norm_decay},
      {"strong-MP failure witness", strong_mp_witness},
      {"Poisson kernel normalization", poisson_normalization},
      {"Green cross-representation", green_cross_representation},
      {"solve-then-apply residuals", solve_then_apply},
      {"strong-MP quantitative bound", strong_bound},
      {"mollification sign preservation", mollification_sign},
      {"truncation inequality", truncation_inequality},
      {"falsification harness", falsification},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %2d  %-32s %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
