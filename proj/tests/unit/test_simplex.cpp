#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ricav/rng.hpp"
#include "ricav/simplex.hpp"

using namespace ricav;

TEST_SUITE("simplex") {

TEST_CASE("tiny maximization with a known optimum") {
  // max 3x + 2y  st  x + y = 4, x - y = 0  ->  x = y = 2, value 10
  LpProblem lp;
  lp.m = 2;
  lp.n = 2;
  lp.cols = {{1.0, 1.0}, {1.0, -1.0}};
  lp.b = {4.0, 0.0};
  lp.c = {3.0, 2.0};
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.value == doctest::Approx(10.0));
  CHECK(sol.x[0] == doctest::Approx(2.0));
  CHECK(sol.x[1] == doctest::Approx(2.0));
}

TEST_CASE("minimization flag") {
  // min x + y  st  x + y = 1  ->  value 1 whatever the split
  LpProblem lp;
  lp.m = 1;
  lp.n = 2;
  lp.cols = {{1.0}, {1.0}};
  lp.b = {1.0};
  lp.c = {1.0, 1.0};
  lp.maximize = false;
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.value == doctest::Approx(1.0));
}

TEST_CASE("infeasible and unbounded detection") {
  LpProblem bad;
  bad.m = 1;
  bad.n = 1;
  bad.cols = {{1.0}};
  bad.b = {-1.0};
  bad.c = {1.0};
  CHECK(solve_lp(bad).status == LpStatus::Infeasible);

  // max x - y  st  x - y = free direction: x - y = 0 has bounded value 0,
  // so use max x + y  st  x - y = 0 which grows along (t, t).
  LpProblem unb;
  unb.m = 1;
  unb.n = 2;
  unb.cols = {{1.0}, {-1.0}};
  unb.b = {0.0};
  unb.c = {1.0, 1.0};
  CHECK(solve_lp(unb).status == LpStatus::Unbounded);
}

TEST_CASE("duals price the right-hand side") {
  // max 2x + y  st  x + y = 3, x = 1  ->  x=1, y=2, value 4
  LpProblem lp;
  lp.m = 2;
  lp.n = 2;
  lp.cols = {{1.0, 1.0}, {1.0, 0.0}};
  lp.b = {3.0, 1.0};
  lp.c = {2.0, 1.0};
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.value == doctest::Approx(4.0));
  // strong duality: y . b = value
  CHECK(sol.dual[0] * 3.0 + sol.dual[1] * 1.0 == doctest::Approx(4.0));
  // dual feasibility: y . A_j >= c_j for a maximization
  for (std::size_t j = 0; j < lp.n; ++j) {
    double red = 0.0;
    for (std::size_t i = 0; i < lp.m; ++i) red += sol.dual[i] * lp.cols[j][i];
    CHECK(red >= lp.c[j] - 1e-9);
  }
}

TEST_CASE("random degenerate transport problems stay consistent") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    // max c.x st sum x = 1, a.x = t with a in [0,1]^n: a weighted-average
    // constraint that always admits a feasible mixture.
    std::size_t n = 2 + rng.below(6);
    LpProblem lp;
    lp.m = 2;
    lp.n = n;
    Vec a(n);
    for (double& v : a) v = rng.u01();
    double lo = *std::min_element(a.begin(), a.end());
    double hi = *std::max_element(a.begin(), a.end());
    double t = lo + (hi - lo) * rng.u01();
    for (std::size_t j = 0; j < n; ++j) lp.cols.push_back({1.0, a[j]});
    lp.b = {1.0, t};
    lp.c.resize(n);
    for (double& v : lp.c) v = rng.uniform(-1.0, 1.0);
    LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    double mass = 0.0, mean = 0.0, val = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(sol.x[j] >= -1e-9);
      mass += sol.x[j];
      mean += a[j] * sol.x[j];
      val += lp.c[j] * sol.x[j];
    }
    CHECK(mass == doctest::Approx(1.0));
    CHECK(mean == doctest::Approx(t));
    CHECK(val == doctest::Approx(sol.value));
    // duals certify optimality
    double dual_val = sol.dual[0] * 1.0 + sol.dual[1] * t;
    CHECK(dual_val == doctest::Approx(sol.value).epsilon(1e-7));
  }
}

}  // TEST_SUITE
