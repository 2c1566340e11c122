#include <doctest.h>

#include <chrono>
#include <cmath>

#include "ricav/envelope.hpp"
#include "ricav/errors.hpp"
#include "ricav/rng.hpp"
#include "ricav/solver.hpp"

using namespace ricav;

namespace {

const Belief kHalf = make_belief({0.5, 0.5});

Menu worked_union() {
  return make_menu({make_act({0.0, 0.0}, "0"), make_act({-1.3125, 1.1875}, "a"),
                    make_act({1.1875, -1.3125}, "b")});
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("worked two-state example: values, support, slopes") {
  CostPtr k = make_kinked_cost(kHalf, 1.0, 1.0);
  Grid grid = make_grid(*k, 257, {{0.75}, {0.25}});

  Menu zero = make_menu({make_act({0.0, 0.0}, "0")});
  Menu fa = make_menu({make_act({0.0, 0.0}, "0"), make_act({-1.3125, 1.1875}, "a")});
  Menu fb = make_menu({make_act({0.0, 0.0}, "0"), make_act({1.1875, -1.3125}, "b")});

  SolveReport rz = solve_menu(*k, zero, grid);
  CHECK(rz.value == doctest::Approx(0.0).epsilon(1e-12));
  REQUIRE(rz.pi.support.size() == 1);
  CHECK(max_norm_dist(rz.pi.support[0], kHalf) < 1e-9);

  CHECK(solve_menu(*k, fa, grid).value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(solve_menu(*k, fb, grid).value == doctest::Approx(0.0).epsilon(1e-12));

  SolveReport ru = solve_menu(*k, worked_union(), grid);
  CHECK(ru.value == doctest::Approx(0.4375).epsilon(1e-12));
  CHECK(ru.gross_payoff == doctest::Approx(1.1875));
  CHECK(ru.info_cost == doctest::Approx(0.75));
  REQUIRE(ru.pi.support.size() == 2);
  // support at the simplex vertices, equal weights
  CHECK(ru.pi.probs[0] == doctest::Approx(0.5));
  CHECK(ru.pi.probs[1] == doctest::Approx(0.5));
  double lo = std::min(ru.pi.support[0][1], ru.pi.support[1][1]);
  double hi = std::max(ru.pi.support[0][1], ru.pi.support[1][1]);
  CHECK(lo == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(hi == doctest::Approx(1.0).epsilon(1e-12));
  // vertex posteriors choose the matching one-sided act
  CHECK(ru.assignments.size() == 2);
}

TEST_CASE("optimal slope sets for the worked menus") {
  CostPtr k = make_kinked_cost(kHalf, 1.0, 1.0);
  Grid grid = make_grid(*k, 257, {{0.75}, {0.25}});

  HyperplaneSet lz = lambda_set(*k, make_menu({make_act({0.0, 0.0})}), grid);
  REQUIRE(lz.intervals.size() == 1);
  CHECK(lz.intervals[0].lo == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(lz.intervals[0].hi == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(lz.max_width == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(lz.exact);
  CHECK(lz.value == doctest::Approx(0.0));
  // level reconstructs the tangent intercept: value = witness * x0 + level
  CHECK(lz.level == doctest::Approx(lz.value - lz.witness[0] * 0.5));

  HyperplaneSet la =
      lambda_set(*k, make_menu({make_act({0.0, 0.0}), make_act({-1.3125, 1.1875})}), grid);
  CHECK(la.intervals[0].lo == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(la.intervals[0].hi == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(la.max_width <= 1e-6);
  CHECK(la.witness[0] == doctest::Approx(1.0).epsilon(1e-9));

  HyperplaneSet lu = lambda_set(*k, worked_union(), grid);
  CHECK(lu.value == doctest::Approx(0.4375));
  CHECK(lu.witness[0] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("witness slope always supports the net on the grid") {
  Rng rng(23);
  CostPtr costs[] = {make_kinked_cost(kHalf, 1.0, 1.0), make_quadratic_cost(kHalf, 1.0),
                     make_entropy_cost(kHalf)};
  for (const CostPtr& c : costs) {
    Grid grid = make_grid(*c, 65);
    for (int t = 0; t < 30; ++t) {
      std::vector<UtilityAct> acts;
      for (std::size_t i = 0; i < 1 + rng.below(3); ++i) {
        acts.push_back(make_act({rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)}));
      }
      Menu m = make_menu(std::move(acts));
      HyperplaneSet lam = lambda_set(*c, m, grid);
      std::vector<double> net = net_on_grid(*c, m, grid);
      // refined level with refined slope: the plane dominates the whole domain
      CHECK(lambda_supports(net, grid.coords, c->prior_coord(), lam.value, lam.witness, 1e-7));
      CHECK(lam.grid_value <= lam.value + 1e-9);
      // witness slope lies inside every reported interval
      for (const LambdaInterval& iv : lam.intervals) {
        double along = lam.witness[0] * iv.direction[0];
        CHECK(along >= iv.lo - 1e-7);
        CHECK(along <= iv.hi + 1e-7);
      }
    }
  }
}

TEST_CASE("grid solve agrees with the exact 1-D envelope on refined knots") {
  CostPtr k = make_kinked_cost(kHalf, 1.0, 1.0);
  Rng rng(31);
  for (int t = 0; t < 40; ++t) {
    std::vector<UtilityAct> acts;
    for (std::size_t i = 0; i < 1 + rng.below(4); ++i) {
      acts.push_back(make_act({rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)}));
    }
    Menu m = make_menu(std::move(acts));
    Cav1dResult exact = concavify_1d_exact(*k, m);
    std::vector<Vec> knots;
    for (double y : exact.support_coords) knots.push_back({y});
    Grid grid = make_grid(*k, 65, knots);
    SolveReport rep = solve_menu(*k, m, grid);
    CHECK(rep.value == doctest::Approx(exact.value).epsilon(1e-9));
    CHECK(rep.value <= exact.value + 1e-9);  // grid solve is a lower bound
  }
}

TEST_CASE("three-state solve with full information payoffs") {
  Belief prior = make_belief({0.25, 0.25, 0.5});
  CostPtr q = make_quadratic_cost(prior, 0.5);
  // indicator acts: gross payoff 1 under full revelation
  Menu ident = make_menu(
      {make_act({1.0, 0.0, 0.0}), make_act({0.0, 1.0, 0.0}), make_act({0.0, 0.0, 1.0})});
  Grid grid = make_grid(*q, 17);
  SolveReport rep = solve_menu(*q, ident, grid);
  // full revelation: cost = 0.5 * sum_i p_i |e_i - p|^2 in chart coordinates
  Vec x0 = q->prior_coord();
  double cost = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    Vec y = q->chart().apply(make_belief({i == 0 ? 1.0 : 0.0, i == 1 ? 1.0 : 0.0,
                                          i == 2 ? 1.0 : 0.0}));
    double d2 = 0.0;
    for (std::size_t j = 0; j < 2; ++j) d2 += (y[j] - x0[j]) * (y[j] - x0[j]);
    cost += prior[i] * 0.5 * d2;
  }
  CHECK(rep.value == doctest::Approx(1.0 - cost).epsilon(1e-9));
  CHECK(rep.pi.support.size() == 3);

  HyperplaneSet lam = lambda_set(*q, ident, grid);
  CHECK(lam.intervals.size() == 10);  // two axis directions plus eight random probes
}

TEST_CASE("resolution guardrails") {
  CostPtr k = make_kinked_cost(kHalf, 1.0, 1.0);
  CHECK_THROWS_AS(solve_menu(*k, worked_union(), 1), Error);
}

TEST_CASE("solver runtime stays interactive on the worked example") {
  CostPtr k = make_kinked_cost(kHalf, 1.0, 1.0);
  Grid grid = make_grid(*k, 257, {{0.75}, {0.25}});
  auto start = std::chrono::steady_clock::now();
  SolveReport rep = solve_menu(*k, worked_union(), grid);
  HyperplaneSet lam = lambda_set(*k, worked_union(), grid);
  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(rep.value == doctest::Approx(lam.value));
  CHECK(elapsed < 1.0);
}

}  // TEST_SUITE
