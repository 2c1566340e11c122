#include <doctest.h>

#include <cmath>
#include <functional>

#include "ricav/diagnostics.hpp"
#include "ricav/errors.hpp"
#include "ricav/rng.hpp"

using namespace ricav;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a ricav::Error");
  return ErrorCode::SolverError;
}

const Belief kHalf = make_belief({0.5, 0.5});

CostPtr symmetric_pwq() {
  return make_custom_pwq_cost(kHalf,
                              {{0.0, 0.25, 0.0, -2.0, 0.625},
                               {0.25, 0.75, 2.0, -2.0, 0.5},
                               {0.75, 1.0, 0.0, 2.0, -1.375}},
                              {0.25, 0.75});
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("probe finds the kink direction at the prior") {
  CostPtr k = make_kinked_cost(kHalf, 1.0, 1.0);
  auto cert = ndisd_probe(*k, {kHalf});
  REQUIRE(cert.has_value());
  CHECK(cert->points.size() == 1);
  CHECK(cert->lambdas[0][0] == doctest::Approx(-1.0));
  CHECK(cert->delta[0] == doctest::Approx(2.0));
  CHECK(cert->subgrad_residual <= 1e-9);
  CHECK(cert->orth_residual <= 1e-12);
  CHECK(cert->hull_residual <= 1e-12);
}

TEST_CASE("probe returns nothing for smooth costs") {
  CHECK(!ndisd_probe(*make_quadratic_cost(kHalf, 1.0), {kHalf}).has_value());
  CHECK(!ndisd_probe(*make_entropy_cost(kHalf), {kHalf, make_belief({0.25, 0.75})}).has_value());
}

TEST_CASE("probe requires the prior inside the hull of the points") {
  CostPtr k = make_kinked_cost(kHalf, 1.0, 1.0);
  CHECK(code_of([&] { ndisd_probe(*k, {make_belief({0.25, 0.75})}); }) ==
        ErrorCode::PriorNotInHull);
}

TEST_CASE("symmetric kink pair admits no direction under the shifted cut") {
  CostPtr c = symmetric_pwq();
  Belief left = make_belief({0.75, 0.25});
  Belief right = make_belief({0.25, 0.75});
  CHECK(!ndisd_probe(*c, {left, right}).has_value());
  Polytope d = d_set(*c, {left, right});
  REQUIRE(d.singleton());
  CHECK(std::abs(d.vertices[0][0]) < 1e-12);
}

TEST_CASE("d_set widths for the single-point sets") {
  CostPtr k = make_kinked_cost(kHalf, 1.0, 1.0);
  Polytope d = d_set(*k, {kHalf});
  REQUIRE(d.vertices.size() == 2);
  CHECK(d.vertices[0][0] == doctest::Approx(-2.0));
  CHECK(d.vertices[1][0] == doctest::Approx(2.0));

  // kink paired with its smooth reflection: the smooth point pins the set
  CostPtr k2 = make_kinked_cost(make_belief({0.7, 0.3}), 1.0, 1.0, 0.5);
  Polytope d2 = d_set(*k2, {k2->chart().invert({0.5}), k2->chart().invert({0.1})});
  REQUIRE(d2.singleton());

  // under the absolute cut a kink at a nonzero coordinate collapses too
  Polytope d3 = d_set(*k, {kHalf}, OrthConvention::Absolute);
  REQUIRE(d3.singleton());
}

TEST_CASE("jdd verdicts across the model roster") {
  JddReport viol = jdd_check(*make_kinked_cost(kHalf, 1.0, 1.0));
  CHECK(viol.verdict == JddReport::Verdict::Violated);
  CHECK(viol.conclusive);
  REQUIRE(viol.certificate.has_value());
  CHECK(viol.certificate->delta[0] == doctest::Approx(2.0));

  JddReport ent = jdd_check(*make_entropy_cost(kHalf));
  CHECK(ent.verdict == JddReport::Verdict::Satisfied);
  CHECK(ent.conclusive);

  JddReport quad = jdd_check(*make_quadratic_cost(kHalf, 1.0));
  CHECK(quad.verdict == JddReport::Verdict::Satisfied);
  CHECK(quad.conclusive);

  // off-prior kink: the kink candidate and its reflection both clear
  JddReport off = jdd_check(*make_kinked_cost(make_belief({0.7, 0.3}), 1.0, 1.0, 0.5));
  CHECK(off.verdict == JddReport::Verdict::Satisfied);
  CHECK(off.conclusive);
  CHECK(off.cleared.size() >= 2);

  JddReport sym = jdd_check(*symmetric_pwq());
  CHECK(sym.verdict == JddReport::Verdict::Satisfied);
  CHECK(sym.conclusive);
}

TEST_CASE("jdd accepts caller-supplied candidate sets") {
  CostPtr c = symmetric_pwq();
  JddReport rep = jdd_check(*c, {{make_belief({0.75, 0.25}), make_belief({0.25, 0.75})}});
  CHECK(rep.verdict == JddReport::Verdict::Satisfied);
  // prior singleton + kink pair twice (registry and caller) minus dedup details
  CHECK(rep.cleared.size() >= 3);
}

TEST_CASE("tangent menu of a certificate has value zero") {
  CostPtr k = make_kinked_cost(kHalf, 1.0, 1.0);
  auto cert = ndisd_probe(*k, {kHalf});
  REQUIRE(cert.has_value());
  HMenuResult h = build_menu_h(*k, *cert);
  CHECK(h.value == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(h.zero_supported);
  CHECK(h.neg_delta_checked);
  CHECK(h.neg_delta_supported);
  REQUIRE(h.menu.size() == 1);
  CHECK(h.menu.acts[0].u[0] == doctest::Approx(0.5));
  CHECK(h.menu.acts[0].u[1] == doctest::Approx(-0.5));
}

TEST_CASE("two-point tangent menu for the symmetric cost") {
  CostPtr c = symmetric_pwq();
  NdisdCertificate cert;
  cert.points = {make_belief({0.75, 0.25}), make_belief({0.25, 0.75})};
  cert.coords = {{0.25}, {0.75}};
  cert.lambdas = {{-1.0}, {1.0}};
  cert.delta = {0.0};  // no joint direction exists; the menu construction
                       // needs only the tangent slopes
  HMenuResult h = build_menu_h(*c, cert);
  CHECK(h.value == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(h.zero_supported);
  REQUIRE(h.menu.size() == 2);
  // tangent lines -y + 3/8 and y - 5/8
  CHECK(h.menu.acts[0].u[0] == doctest::Approx(0.375));
  CHECK(h.menu.acts[0].u[1] == doctest::Approx(-0.625));
  CHECK(h.menu.acts[1].u[0] == doctest::Approx(-0.625));
  CHECK(h.menu.acts[1].u[1] == doctest::Approx(0.375));
}

TEST_CASE("certificates with wrong slopes are rejected") {
  CostPtr k = make_kinked_cost(kHalf, 1.0, 1.0);
  NdisdCertificate cert;
  cert.points = {kHalf};
  cert.coords = {{0.5}};
  cert.lambdas = {{3.0}};  // not a subgradient
  cert.delta = {0.0};
  CHECK(code_of([&] { build_menu_h(*k, cert); }) == ErrorCode::CertificateInvalid);
}

TEST_CASE("worked counterexample: quarter step, frozen acts, frozen values") {
  CostPtr k = make_kinked_cost(kHalf, 1.0, 1.0);
  auto cert = ndisd_probe(*k, {kHalf});
  REQUIRE(cert.has_value());
  CounterexampleReport ce = build_iia_counterexample(*k, *cert);

  CHECK(ce.epsilon[0] == doctest::Approx(0.25));
  CHECK(ce.predicted_lower_bound == doctest::Approx(0.25));

  REQUIRE(ce.f.size() == 2);
  REQUIRE(ce.g.size() == 2);
  // tangent-from-the-right act: 1.5 y - 0.8125
  CHECK(ce.f.acts[0].u[0] == doctest::Approx(-0.8125));
  CHECK(ce.f.acts[0].u[1] == doctest::Approx(0.6875));
  // lifted left act: -3.5 y + 1.6875
  CHECK(ce.g.acts[0].u[0] == doctest::Approx(1.6875));
  CHECK(ce.g.acts[0].u[1] == doctest::Approx(-1.8125));

  CHECK(ce.value_h == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(ce.value_f == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(ce.value_g == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(ce.value_intersection == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(ce.value_union == doctest::Approx(0.4375).epsilon(1e-9));

  CHECK(ce.axiom.verdict == AxiomReport::Verdict::Violated);
  CHECK(ce.axiom.premise_holds);
  CHECK(ce.axiom.margin == doctest::Approx(0.4375).epsilon(1e-9));
  CHECK(ce.value_union >= ce.predicted_lower_bound - 1e-7);
}

TEST_CASE("counterexample construction needs a nonzero direction") {
  CostPtr c = symmetric_pwq();
  NdisdCertificate cert;
  cert.points = {make_belief({0.75, 0.25}), make_belief({0.25, 0.75})};
  cert.coords = {{0.25}, {0.75}};
  cert.lambdas = {{-1.0}, {1.0}};
  cert.delta = {0.0};
  CHECK(code_of([&] { build_iia_counterexample(*c, cert); }) == ErrorCode::CertificateInvalid);
}

TEST_CASE("ignorance equivalents exist for smooth costs and pinned slopes") {
  CostPtr ent = make_entropy_cost(kHalf);
  Grid grid = make_grid(*ent, 129);
  Rng rng(41);
  for (int t = 0; t < 10; ++t) {
    std::vector<UtilityAct> acts;
    for (std::size_t i = 0; i < 1 + rng.below(3); ++i) {
      acts.push_back(make_act({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)}));
    }
    Menu m = make_menu(std::move(acts));
    SolveReport rep = solve_menu(*ent, m, grid);
    HyperplaneSet lam = lambda_set(*ent, m, grid);
    UtilityAct h = ignorance_equivalent(*ent, m, rep, lam, grid);
    CHECK(h.expectation(kHalf) == doctest::Approx(lam.value).epsilon(1e-7));
  }

  // kinked cost, one-act menu: slope set is wide, must refuse without an override
  CostPtr k = make_kinked_cost(kHalf, 1.0, 1.0);
  Grid gk = make_grid(*k, 129);
  Menu zero = make_menu({make_act({0.0, 0.0})});
  SolveReport rz = solve_menu(*k, zero, gk);
  HyperplaneSet lz = lambda_set(*k, zero, gk);
  CHECK(code_of([&] { ignorance_equivalent(*k, zero, rz, lz, gk); }) ==
        ErrorCode::NonUniqueHyperplane);
  // with an admissible override the act goes through
  UtilityAct h = ignorance_equivalent(*k, zero, rz, lz, gk, Vec{1.0});
  CHECK(h.expectation(kHalf) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("axiom checks pass on smooth costs and straddle the worked example") {
  CostPtr k = make_kinked_cost(kHalf, 1.0, 1.0);
  Grid grid = make_grid(*k, 257, {{0.75}, {0.25}});
  Menu fa = make_menu({make_act({0.0, 0.0}, "0"), make_act({-1.3125, 1.1875}, "a")});
  Menu fb = make_menu({make_act({0.0, 0.0}, "0"), make_act({1.1875, -1.3125}, "b")});

  AxiomReport iia = check_iia(*k, fa, fb, grid);
  CHECK(iia.verdict == AxiomReport::Verdict::Violated);
  CHECK(iia.premise_holds);
  CHECK(iia.margin == doctest::Approx(0.4375).epsilon(1e-9));

  // disjoint menus: premise is undefined, not a violation
  Menu solo = make_menu({make_act({0.3, 0.1})});
  AxiomReport disjoint = check_iia(*k, fa, solo, grid);
  CHECK(disjoint.verdict == AxiomReport::Verdict::PremiseFails);

  CostPtr ent = make_entropy_cost(kHalf);
  Grid ge = make_grid(*ent, 129);
  Rng rng(43);
  for (int t = 0; t < 10; ++t) {
    std::vector<UtilityAct> shared = {make_act({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)})};
    Menu f = make_menu({shared[0], make_act({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)})});
    Menu g = make_menu({shared[0], make_act({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)})});
    AxiomReport rep = check_iia(*ent, f, g, ge);
    CHECK(rep.verdict != AxiomReport::Verdict::Violated);
    AxiomReport ie = check_ie(*ent, f, ge);
    CHECK(ie.verdict == AxiomReport::Verdict::Satisfied);
  }

  AxiomReport iek = check_ie(*k, fa, grid);
  CHECK(iek.verdict == AxiomReport::Verdict::Satisfied);
}

TEST_CASE("finite cost family rejects every tangent act on the spread menu") {
  std::vector<PsiComponent> comps;
  comps.push_back({"zero", [](const Vec&) { return 0.0; }, {0.0}});
  comps.push_back({"shifted", [](const Vec& y) { return (y[0] - 0.5) * (y[0] - 0.5) - 0.1; },
                   {0.0}});
  FinitePsiModel fm = make_finite_psi_model(comps, kHalf);
  Menu spread = make_menu({make_act({-2.0, 2.0}), make_act({2.0, -2.0})});
  AxiomReport rep = check_ie(fm, spread);
  CHECK(rep.verdict == AxiomReport::Verdict::Violated);
  CHECK(rep.premise_holds);
  CHECK(rep.margin == doctest::Approx(0.06).epsilon(1e-7));
  REQUIRE(rep.witness.has_value());
  CHECK(rep.witness->u[0] == doctest::Approx(1.85));
  CHECK(rep.witness->u[1] == doctest::Approx(1.85));
}

TEST_CASE("cost recovery from irrelevant tangents is exact on the grid") {
  for (CostPtr c : {make_kinked_cost(kHalf, 1.0, 1.0), make_quadratic_cost(kHalf, 1.0)}) {
    Grid grid = make_grid(*c, 33);
    RecoveredPsi rec = recover_psi(*c, grid);
    CHECK(rec.all_irrelevant);
    CHECK(rec.max_error <= 1e-8);
  }
}

TEST_CASE("irrelevance of tangents and relevance of dominating acts") {
  CostPtr k = make_kinked_cost(kHalf, 1.0, 1.0);
  Grid grid = make_grid(*k, 65);
  // a line strictly below psi except at the prior
  UtilityAct tangent = act_from_affine(k->chart(), {0.5}, {0.5}, 0.0);
  CHECK(is_irrelevant(*k, tangent, grid));
  // a line above psi near the vertex is worth adding
  UtilityAct high = act_from_affine(k->chart(), {2.5}, {0.5}, 0.0);
  CHECK(!is_irrelevant(*k, high, grid));
}

}  // TEST_SUITE
