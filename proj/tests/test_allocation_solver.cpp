#include <cmath>
#include <random>

#include "doctest.h"
#include "fcba/allocation_solver.hpp"
#include "fcba/instances.hpp"

using namespace fcba;

namespace {

ProblemInstance gauss(std::vector<double> m, std::vector<double> v) { return ProblemInstance::gaussian(m, v); }

double linf(const SamplingRatios& a, const SamplingRatios& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::vector<double> random_interior(std::mt19937_64& g, std::size_t k) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  std::vector<double> p(k);
  double s = 0;
  for (auto& x : p) s += (x = u(g));
  for (auto& x : p) x /= s;
  return p;
}

ProblemInstance stepping(std::size_t k, double var) {
  InstanceSpec spec;
  spec.k = k;
  spec.equal_variance = var;
  return generate_instance(spec);
}

}  // namespace

TEST_CASE("simplex projection") {
  auto p = project_to_simplex({0.2, 0.3, 0.5});
  CHECK(p[0] == doctest::Approx(0.2));
  p = project_to_simplex({2.0, 0.0, 0.0});
  CHECK(p == std::vector<double>{1.0, 0.0, 0.0});
  p = project_to_simplex({0.5, 0.5, -3.0}, 0.01);
  CHECK(p[2] == doctest::Approx(0.01));
  CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0));
  CHECK(p[0] == doctest::Approx(p[1]));
}

TEST_CASE("rate-optimal allocation") {
  const auto inst = gauss({1, 0, 0}, {1, 1, 1});
  const auto p = solve_roa(inst);
  CHECK(p[0] == doctest::Approx(std::sqrt(2.0) / (2 + std::sqrt(2.0))).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(0.292893218813).epsilon(1e-11));
  CHECK(p[1] == doctest::Approx(p[2]).epsilon(1e-14));

  const auto asym = gauss({1, 0.7, 0.2, -0.4}, {1, 2, 0.5, 3});
  const auto q = solve_roa(asym);
  const double r1 = r_j(asym, 1, q);
  for (std::size_t j = 2; j < 4; ++j) CHECK(std::abs(r_j(asym, j, q) - r1) < 1e-10);
  double bal = q[0] * q[0] / 1.0;
  for (std::size_t j = 1; j < 4; ++j) bal -= q[j] * q[j] / asym[j].variance();
  CHECK(std::abs(bal) < 1e-10);

  for (double c : {0.1, 3.0, 40.0}) {
    const auto scaled = solve_roa(gauss({1, 0.7, 0.2, -0.4}, {c * 1, c * 2, c * 0.5, c * 3}));
    CHECK(linf(scaled, q) < 1e-10);
  }
}

TEST_CASE("kkt residuals") {
  const auto r = kkt_residuals(gauss({1, 0, 0}, {1, 1, 1}), SamplingRatios({0.5, 0.25, 0.25}), 100, 0);
  CHECK(r.balance_gap == doctest::Approx(0.125));
  CHECK(r.score_spread == doctest::Approx(0.0));
  const auto a = kkt_residuals(gauss({1, 0.5, 0}, {1, 1, 1}), SamplingRatios::uniform(3), 100, 0);
  CHECK(a.score_spread > 0.0);
  CHECK(a.relative_score_spread > 0.0);
}

TEST_CASE("solve_v_ell on the symmetric instance") {
  const auto inst = gauss({1, 0, 0}, {1, 1, 1});
  for (double T : {20.0, 50.0, 300.0, 5000.0}) {
    const auto res = solve_v_ell_detailed(inst, T, 0);
    CHECK(res.ratios[1] == res.ratios[2]);
    CHECK(res.residual.score_spread < 1e-8);
    CHECK(std::abs(res.residual.balance_gap) < 1e-8);
  }
}

TEST_CASE("solver input checks") {
  const auto inst = gauss({1, 0, 0}, {1, 1, 1});
  CHECK_THROWS_WITH_AS(solve_v_ell(inst, 100, 1), doctest::Contains("even order required"), InvalidArgument);
  const ProblemInstance ex({AlternativeModel::exponential(2), AlternativeModel::exponential(1)});
  CHECK_THROWS_AS(solve_v_ell(ex, 100, 0), UnsupportedModel);
  CHECK_THROWS_AS(solve_roa(ex), UnsupportedModel);
  SolverOptions tight;
  tight.max_iterations = 1;
  tight.newton_polish = false;
  try {
    (void)solve_v_ell(gauss({1, 0.8, 0.1, 0}, {1, 3, 1, 0.2}), 200, 0, tight);
    FAIL("expected a solver error");
  } catch (const SolverError& e) {
    CHECK(e.residual().relative_score_spread > 1e-6);
  }
}

TEST_CASE("solution is unique, interior and a global minimum") {
  std::mt19937_64 g(31);
  std::uniform_real_distribution<double> um(0, 1), uv(0.5, 4);
  for (int t = 0; t < 5; ++t) {
    const std::size_t k = 3 + 2 * t;
    std::vector<double> m(k), v(k);
    for (std::size_t i = 0; i < k; ++i) {
      m[i] = i == 0 ? 1.2 : um(g);
      v[i] = uv(g);
    }
    const auto inst = gauss(m, v);
    for (int order : {0, 2}) {
      const double T = 100.0 * (t + 1);
      SolverOptions a, b;
      a.initial = random_interior(g, k);
      b.initial = random_interior(g, k);
      const auto ra = solve_v_ell_detailed(inst, T, order, a);
      const auto rb = solve_v_ell_detailed(inst, T, order, b);
      CHECK(linf(ra.ratios, rb.ratios) < 1e-8);
      CHECK(ra.residual.relative_score_spread < 1e-6);
      for (std::size_t i = 0; i < k; ++i) CHECK(ra.ratios[i] > 1e-4);

      const double best = v_ell(inst, ra.ratios, T, order).total;
      for (int s = 0; s < 100; ++s) {
        const SamplingRatios q(random_interior(g, k));
        CHECK(best <= v_ell(inst, q, T, order).total * (1 + 1e-12));
      }
      for (std::size_t i = 1; i < ra.log_objective_trace.size(); ++i)
        CHECK(ra.log_objective_trace[i] <= ra.log_objective_trace[i - 1] + 1e-12);
      const auto kkt = kkt_residuals(inst, ra.ratios, T, order);
      CHECK(kkt.relative_score_spread < 1e-6);
    }
  }
}

TEST_CASE("finite-budget ratios approach the rate-optimal ratios") {
  const auto inst = stepping(10, 1.0);
  const auto roa = solve_roa(inst);
  double prev_gap = 1.0, prev_p1 = 0.0;
  for (double T : {1e2, 1e3, 1e4, 1e5}) {
    const auto p = solve_v_ell(inst, T, 0);
    const double gap = linf(p, roa);
    MESSAGE("T = " << T << "  Linf distance to rate-optimal = " << gap);
    CHECK(gap < prev_gap);
    CHECK(p[0] > prev_p1);
    CHECK(p[0] < roa[0]);
    prev_gap = gap;
    prev_p1 = p[0];
  }
  for (double var : {1.0, 4.0}) {
    const auto big = stepping(50, var);
    const auto p = solve_v_ell(big, 1000, 0);
    for (std::size_t i = 0; i < 50; ++i) CHECK(p[i] > 1e-4);
  }
}
