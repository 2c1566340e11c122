#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ricav/beliefs.hpp"
#include "ricav/costs.hpp"
#include "ricav/diagnostics.hpp"
#include "ricav/envelope.hpp"
#include "ricav/errors.hpp"
#include "ricav/menus.hpp"
#include "ricav/rng.hpp"
#include "ricav/solver.hpp"

using namespace ricav;

namespace {

UtilityAct random_act(Rng& rng, std::size_t n, double span = 2.0) {
  UtilityAct a;
  for (std::size_t s = 0; s < n; ++s) a.u.push_back(span * (2.0 * rng.u01() - 1.0));
  return a;
}

Menu random_menu(Rng& rng, std::size_t n, std::size_t max_acts) {
  std::size_t count = 1 + static_cast<std::size_t>(rng.u01() * max_acts);
  std::vector<UtilityAct> acts;
  for (std::size_t i = 0; i < count; ++i) acts.push_back(random_act(rng, n));
  return make_menu(std::move(acts));
}

// mean preserving spread: repeatedly split one support point along e_i - e_j
PosteriorDistribution random_spread(Rng& rng, const Belief& prior, std::size_t splits) {
  std::vector<Vec> pts = {prior.w};
  Vec probs = {1.0};
  std::size_t n = prior.size();
  for (std::size_t k = 0; k < splits; ++k) {
    std::size_t at = static_cast<std::size_t>(rng.u01() * pts.size());
    std::size_t i = static_cast<std::size_t>(rng.u01() * n);
    std::size_t j = static_cast<std::size_t>(rng.u01() * n);
    if (i == j) continue;
    const Vec& p = pts[at];
    double up = 0.9 * rng.u01() * p[j];   // move toward e_i
    double dn = 0.9 * rng.u01() * p[i];   // move toward e_j
    if (up < 1e-6 || dn < 1e-6) continue;
    Vec hi = p, lo = p;
    hi[i] += up;
    hi[j] -= up;
    lo[i] -= dn;
    lo[j] += dn;
    double w = probs[at];
    probs[at] = w * dn / (up + dn);
    probs.push_back(w * up / (up + dn));
    pts[at] = hi;
    pts.push_back(lo);
  }
  std::vector<Belief> support;
  for (const Vec& p : pts) support.push_back(make_belief(p));
  return make_posterior_distribution(support, probs, prior);
}

std::vector<std::size_t> random_merge(Rng& rng, std::size_t n) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.u01() < 0.5) idx.push_back(i);
  }
  if (idx.size() < 2) {
    idx = {0, n - 1};
  }
  return idx;
}

// random convex piecewise quadratic on [0, 1] with optional slope jumps
struct RandomPwq {
  std::vector<PwqCell> cells;
  std::vector<double> kinks;
};

RandomPwq random_pwq(Rng& rng) {
  std::size_t k = 1 + static_cast<std::size_t>(rng.u01() * 3.0);
  std::vector<double> edges = {0.0};
  for (std::size_t i = 1; i < k; ++i) edges.push_back(0.1 + 0.8 * rng.u01());
  edges.push_back(1.0);
  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 1; i + 1 < edges.size(); ++i) {
    if (edges[i] - edges[i - 1] < 0.05) edges[i] = edges[i - 1] + 0.05;
  }

  RandomPwq out;
  double v = rng.u01();
  double s = 2.0 * rng.u01() - 2.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double lo = edges[i], hi = edges[i + 1];
    if (i > 0 && rng.u01() < 0.6) {
      double jump = 0.3 + 1.2 * rng.u01();
      s += jump;
      out.kinks.push_back(lo);
    }
    double a = 1.5 * rng.u01();
    double b = s - 2.0 * a * lo;
    double c = v - (a * lo + b) * lo;
    out.cells.push_back({lo, hi, a, b, c});
    v = (a * hi + b) * hi + c;
    s = 2.0 * a * hi + b;
  }
  return out;
}

Belief pwq_prior(Rng& rng, const RandomPwq& q) {
  double y = 0.08 + 0.84 * rng.u01();
  for (double kink : q.kinks) {
    if (std::abs(y - kink) < 0.02) y = kink + 0.03;
  }
  y = std::min(0.95, std::max(0.05, y));
  return make_belief({1.0 - y, y});
}

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("garbling an attention strategy never increases its cost") {
  struct Case {
    CostPtr model;
    std::size_t splits;
  };
  std::vector<Case> cases;
  cases.push_back({make_entropy_cost(make_belief({0.5, 0.5})), 4});
  cases.push_back({make_quadratic_cost(make_belief({0.3, 0.7}), 1.7), 4});
  cases.push_back({make_kinked_cost(make_belief({0.5, 0.5}), 1.0, 1.0), 4});
  cases.push_back({make_quadratic_cost(make_belief({0.25, 0.25, 0.5}), 0.8), 5});
  cases.push_back({make_entropy_cost(make_belief({0.2, 0.3, 0.5})), 5});

  Rng rng(0xb1ac4e11u);
  for (const Case& c : cases) {
    const Belief& prior = c.model->prior();
    for (int trial = 0; trial < 200; ++trial) {
      PosteriorDistribution pi = random_spread(rng, prior, c.splits);
      if (pi.support.size() < 2) continue;
      PosteriorDistribution coarse = garble(pi, random_merge(rng, pi.support.size()));
      double fine_cost = cost_of(*c.model, pi);
      double coarse_cost = cost_of(*c.model, coarse);
      CHECK(coarse_cost <= fine_cost + 1e-9);
    }
  }
}

TEST_CASE("adding an act to every option shifts the value by its prior expectation") {
  std::vector<CostPtr> models;
  models.push_back(make_kinked_cost(make_belief({0.5, 0.5}), 1.0, 1.0));
  models.push_back(make_quadratic_cost(make_belief({0.3, 0.7}), 1.0));
  models.push_back(make_entropy_cost(make_belief({0.5, 0.5})));
  models.push_back(make_quadratic_cost(make_belief({0.2, 0.3, 0.5}), 0.6));

  Rng rng(0x7a45417u);
  for (const CostPtr& model : models) {
    std::size_t n = model->prior().size();
    Grid grid = make_grid(*model, 33);
    for (int trial = 0; trial < 250; ++trial) {
      Menu f = random_menu(rng, n, 4);
      UtilityAct h = random_act(rng, n);
      double shift = h.expectation(model->prior());
      SolveReport base = solve_menu(*model, f, grid);
      SolveReport moved = solve_menu(*model, translate_menu(f, h), grid);
      CHECK(moved.value == doctest::Approx(base.value + shift).scale(1).epsilon(1e-9));
    }
  }
}

TEST_CASE("translation shifts every optimal-slope interval by the act's pullback slope") {
  CostPtr model = make_kinked_cost(make_belief({0.5, 0.5}), 1.0, 1.0);
  Rng rng(0x5107e5u);
  Grid grid = make_grid(*model, 33);
  for (int trial = 0; trial < 40; ++trial) {
    Menu f = random_menu(rng, 2, 3);
    UtilityAct h = random_act(rng, 2);
    // chart slope of the affine map y -> h . p(y), via p = C y + d
    Vec slope(grid.chart.dim, 0.0);
    for (std::size_t i = 0; i < grid.chart.dim; ++i) {
      for (std::size_t s = 0; s < 2; ++s) slope[i] += grid.chart.C[s][i] * h.u[s];
    }
    HyperplaneSet lam = lambda_set(*model, f, grid);
    HyperplaneSet moved = lambda_set(*model, translate_menu(f, h), grid);
    REQUIRE(lam.intervals.size() == moved.intervals.size());
    CHECK(moved.value == doctest::Approx(lam.value + h.expectation(model->prior())).epsilon(1e-9));
    for (std::size_t i = 0; i < lam.intervals.size(); ++i) {
      const LambdaInterval& a = lam.intervals[i];
      const LambdaInterval& b = moved.intervals[i];
      double ds = slope[0] * a.direction[0];
      if (std::isfinite(a.lo)) CHECK(b.lo == doctest::Approx(a.lo + ds).epsilon(1e-6));
      if (std::isfinite(a.hi)) CHECK(b.hi == doctest::Approx(a.hi + ds).epsilon(1e-6));
    }
  }
}

TEST_CASE("grid solve matches the exact envelope once its support points are knots") {
  Rng rng(0x9e37f98du);
  for (int trial = 0; trial < 200; ++trial) {
    RandomPwq spec = random_pwq(rng);
    Belief prior = pwq_prior(rng, spec);
    CostPtr model;
    try {
      model = make_custom_pwq_cost(prior, spec.cells, spec.kinks);
    } catch (const Error&) {
      continue;  // degenerate draw (prior clipped onto a cell edge)
    }
    Menu f = random_menu(rng, 2, 3);

    Cav1dResult cav = concavify_1d_exact(*model, f);
    HyperplaneSet lam = lambda_set(*model, f, 17);
    CHECK(lam.exact);
    CHECK(lam.value == doctest::Approx(cav.value).epsilon(1e-10));

    std::vector<Vec> knots;
    for (double c : cav.support_coords) knots.push_back({c});
    Grid fine = make_grid(*model, 33, knots);
    SolveReport rep = solve_menu(*model, f, fine);
    CHECK(rep.value == doctest::Approx(cav.value).scale(1).epsilon(1e-9));

    Vec prior_coord = fine.chart.apply(prior);
    CHECK(lambda_supports(net_on_grid(*model, f, fine), fine.coords, prior_coord, cav.value,
                          {cav.slope}, 1e-7));
  }
}

TEST_CASE("grounding a piecewise quadratic ignores affine tilts and is idempotent") {
  Rng rng(0xca4031cau);
  for (int trial = 0; trial < 100; ++trial) {
    RandomPwq spec = random_pwq(rng);
    Belief prior = pwq_prior(rng, spec);
    double alpha = 2.0 * rng.u01() - 1.0;
    double beta = 2.0 * rng.u01() - 1.0;
    std::vector<PwqCell> tilted = spec.cells;
    for (PwqCell& cell : tilted) {
      cell.b += alpha;
      cell.c += beta;
    }
    CostPtr a, b;
    try {
      a = make_custom_pwq_cost(prior, spec.cells, spec.kinks);
      b = make_custom_pwq_cost(prior, tilted, spec.kinks);
    } catch (const Error&) {
      continue;
    }
    for (int probe = 0; probe < 50; ++probe) {
      double y = rng.u01();
      Belief p = make_belief({1.0 - y, y});
      CHECK(a->psi(p) == doctest::Approx(b->psi(p)).scale(1).epsilon(1e-9));
    }

    CostPtr again = make_custom_pwq_cost(prior, a->cells(), spec.kinks);
    for (int probe = 0; probe < 20; ++probe) {
      double y = rng.u01();
      Belief p = make_belief({1.0 - y, y});
      CHECK(again->psi(p) == doctest::Approx(a->psi(p)).scale(1).epsilon(1e-12));
    }
  }
}

TEST_CASE("diagnostic verdicts survive a change of chart") {
  Rng rng(0xc4a27u);
  CostPtr kinked = make_kinked_cost(make_belief({0.5, 0.5}), 1.0, 1.0);
  CostPtr quad = make_quadratic_cost(make_belief({0.4, 0.6}), 1.3);
  for (int trial = 0; trial < 12; ++trial) {
    double s = (rng.u01() < 0.5 ? -1.0 : 1.0) * (0.5 + 1.5 * rng.u01());
    double t = 2.0 * rng.u01() - 1.0;

    JddReport jk = jdd_check(*rechart_cost(kinked, {{s}}, {t}));
    CHECK(jk.verdict == JddReport::Verdict::Violated);
    REQUIRE(jk.certificate.has_value());
    CHECK(std::abs(jk.certificate->delta[0]) ==
          doctest::Approx(2.0 / std::abs(s)).epsilon(1e-7));

    JddReport jq = jdd_check(*rechart_cost(quad, {{s}}, {t}));
    CHECK(jq.verdict == JddReport::Verdict::Satisfied);
    CHECK(jq.conclusive);
  }

  CostPtr quad3 = make_quadratic_cost(make_belief({0.2, 0.3, 0.5}), 0.9);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Vec> R = {{1.0 + rng.u01(), rng.u01() - 0.5},
                          {rng.u01() - 0.5, 1.0 + rng.u01()}};
    Vec t = {rng.u01(), rng.u01()};
    CostPtr re = rechart_cost(quad3, R, t);
    CHECK(!ndisd_probe(*re, {re->prior()}).has_value());
    CHECK(jdd_check(*re).verdict == JddReport::Verdict::Satisfied);
  }
}

TEST_CASE("tangent recovery reproduces every built-in cost on its own grid") {
  struct Case {
    CostPtr model;
    std::size_t resolution;
    double tol;
  };
  std::vector<PwqCell> sym = {{0.0, 0.25, 0.0, -2.0, 0.625},
                              {0.25, 0.75, 2.0, -2.0, 0.5},
                              {0.75, 1.0, 0.0, 2.0, -1.375}};
  std::vector<Case> cases;
  cases.push_back({make_kinked_cost(make_belief({0.5, 0.5}), 1.0, 1.0), 41, 1e-8});
  cases.push_back({make_quadratic_cost(make_belief({0.35, 0.65}), 0.7), 33, 1e-8});
  cases.push_back(
      {make_custom_pwq_cost(make_belief({0.5, 0.5}), sym, {0.25, 0.75}), 65, 1e-8});
  cases.push_back({make_entropy_cost(make_belief({0.5, 0.5})), 33, 1e-6});

  for (const Case& c : cases) {
    RecoveredPsi r = recover_psi(*c.model, make_grid(*c.model, c.resolution));
    CHECK(r.max_error <= c.tol);
  }
}

}  // TEST_SUITE
