#include "ricav/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ricav/diagnostics.hpp"
#include "ricav/errors.hpp"
#include "ricav/json_io.hpp"
#include "ricav/solver.hpp"

namespace ricav {

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kViolation = 2;

const CostModel& need_model(const ParsedCost& cost) {
  if (cost.is_finite()) {
    throw Error(ErrorCode::UnsupportedCostFamily,
                "this operation needs a posterior separable cost, the loaded problem uses a "
                "finite cost family");
  }
  return *cost.model;
}

void emit(std::ostream& out, const Json& doc) { out << doc.dump(2) << "\n"; }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Discrete upper concave envelope of (x_i, v_i) with x strictly increasing.
std::vector<double> upper_envelope(const std::vector<double>& x, const std::vector<double>& v) {
  const std::size_t n = x.size();
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < n; ++i) {
    while (hull.size() >= 2) {
      std::size_t a = hull[hull.size() - 2];
      std::size_t b = hull.back();
      double cross = (v[i] - v[a]) * (x[b] - x[a]) - (v[b] - v[a]) * (x[i] - x[a]);
      if (cross >= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(i);
  }
  std::vector<double> cav(n, 0.0);
  for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
    std::size_t a = hull[k];
    std::size_t b = hull[k + 1];
    double slope = (v[b] - v[a]) / (x[b] - x[a]);
    for (std::size_t i = a; i <= b; ++i) cav[i] = v[a] + slope * (x[i] - x[a]);
  }
  if (hull.size() == 1) cav[hull[0]] = v[hull[0]];
  return cav;
}

Json preset_doc(const std::string& name) {
  if (name == "sec33") {
    Json act0 = Json{{"label", "0"}, {"u", {0.0, 0.0}}};
    Json acta = Json{{"label", "a"}, {"u", {-1.3125, 1.1875}}};
    Json actb = Json{{"label", "b"}, {"u", {1.1875, -1.3125}}};
    return Json{
        {"states", {"w1", "w2"}},
        {"prior", {0.5, 0.5}},
        {"cost", {{"type", "kinked_abs_quad"}, {"params", {{"weight", 1.0}, {"quad", 1.0}}}}},
        {"menus",
         {{"zero", Json::array({act0})},
          {"FA", Json::array({act0, acta})},
          {"FB", Json::array({act0, actb})},
          {"union", Json::array({act0, acta, actb})}}},
        {"grid", {{"resolution", 257}, {"extra_knots", {{0.75, 0.25}, {0.25, 0.75}}}}},
        {"seed", kProbeSeed}};
  }
  if (name == "finite-ie") {
    return Json{
        {"states", {"w1", "w2"}},
        {"prior", {0.5, 0.5}},
        {"cost",
         {{"type", "finite_max"},
          {"params",
           {{"components",
             {Json{{"type", "zero"}},
              Json{{"type", "shifted_quadratic"},
                   {"weight", 1.0},
                   {"center", 0.5},
                   {"offset", -0.1}}}}}}}},
        {"menus",
         {{"Fstar",
           Json::array({Json{{"label", "f1"}, {"u", {-2.0, 2.0}}},
                        Json{{"label", "f2"}, {"u", {2.0, -2.0}}}})}}},
        {"grid", {{"resolution", 257}}},
        {"seed", kProbeSeed}};
  }
  throw Error(ErrorCode::ParseError, "unknown preset '" + name + "' (try sec33 or finite-ie)");
}

int axiom_exit(const AxiomReport& r) {
  return r.verdict == AxiomReport::Verdict::Violated ? kViolation : kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"concavification solver and smoothness diagnostics for costly information"};
  app.name("ricav");
  app.require_subcommand(1);

  std::string problem_path;
  std::string orth = "shifted";
  std::string out_path;
  std::string name_a;
  std::string name_b;
  app.add_option("--problem", problem_path, "problem description (JSON file)");
  app.add_option("--orth", orth, "orthogonality convention for direction probes")
      ->check(CLI::IsMember({"shifted", "absolute"}));
  std::uint64_t seed_override = 0;
  CLI::Option* seed_opt =
      app.add_option("--seed", seed_override, "override the probe seed from the problem file");

  CLI::App* c_solve = app.add_subcommand("solve", "concavified value of a menu at the prior");
  c_solve->add_option("menu", name_a, "menu name")->required();
  CLI::App* c_lambda =
      app.add_subcommand("lambda", "set of optimal hyperplane slopes for a menu");
  c_lambda->add_option("menu", name_a, "menu name")->required();
  CLI::App* c_iia = app.add_subcommand("check-iia", "test menu independence for a pair of menus");
  c_iia->add_option("f", name_a, "first menu name")->required();
  c_iia->add_option("g", name_b, "second menu name")->required();
  CLI::App* c_ie =
      app.add_subcommand("check-ie", "test existence of an ignorance equivalent act");
  c_ie->add_option("menu", name_a, "menu name")->required();
  CLI::App* c_jdd =
      app.add_subcommand("jdd", "probe the cost for a joint differentiability failure");
  CLI::App* c_ce = app.add_subcommand(
      "counterexample", "build a menu pair separating the axioms when the cost allows it");
  CLI::App* c_recover =
      app.add_subcommand("recover", "reconstruct the cost from menu values alone");
  CLI::App* c_plot = app.add_subcommand("plot-data", "tabulate net value and envelope (CSV)");
  c_plot->add_option("menu", name_a, "menu name")->required();
  c_plot->add_option("--out", out_path, "write the table to a file instead of stdout");
  CLI::App* c_preset = app.add_subcommand("preset", "print a ready-made problem file");
  c_preset->add_option("name", name_a, "preset name (sec33 or finite-ie)")->required();

  std::vector<const char*> argv;
  argv.push_back("ricav");
  for (const std::string& s : args) argv.push_back(s.c_str());

  try {
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kOk;
    } catch (const CLI::ParseError& e) {
      emit(err, Json{{"error", "usage"}, {"message", e.what()}});
      return kError;
    }

    if (*c_preset) {
      Json doc = preset_doc(name_a);
      emit(out, doc);
      err << "preset " << name_a << ": problem file written to stdout\n";
      return kOk;
    }

    if (problem_path.empty()) {
      throw Error(ErrorCode::ParseError, "--problem FILE is required for this command");
    }
    ProblemFile pf = load_problem(problem_path);
    if (seed_opt->count() > 0) pf.seed = seed_override;
    OrthConvention conv =
        orth == "absolute" ? OrthConvention::Absolute : OrthConvention::Shifted;

    if (*c_solve) {
      const CostModel& model = need_model(pf.cost);
      const Menu& menu = find_menu(pf, name_a);
      Grid grid = make_grid(model, pf.resolution, pf.extra_knots);
      SolveReport rep = solve_menu(model, menu, grid);
      HyperplaneSet lam = lambda_set(model, menu, grid);
      Json doc{{"menu", name_a},
               {"value", lam.value},
               {"gross_payoff", rep.gross_payoff},
               {"info_cost", rep.info_cost},
               {"pi", rep.pi},
               {"assignments", rep.assignments},
               {"lambda",
                Json{{"witness", lam.witness},
                     {"intervals", lam.intervals},
                     {"max_width", std::isfinite(lam.max_width) ? Json(lam.max_width)
                                                                : Json(nullptr)},
                     {"exact", lam.exact}}},
               {"grid",
                Json{{"points", grid.points.size()},
                     {"resolution", pf.resolution},
                     {"clamped", grid.clamped},
                     {"value", rep.value}}}};
      emit(out, doc);
      err << "solve " << name_a << ": value " << fmt_short(lam.value) << " over "
          << grid.points.size() << " grid points in " << fmt_short(rep.runtime_seconds)
          << "s\n";
      return kOk;
    }
    if (*c_lambda) {
      const CostModel& model = need_model(pf.cost);
      const Menu& menu = find_menu(pf, name_a);
      Grid grid = make_grid(model, pf.resolution, pf.extra_knots);
      HyperplaneSet lam = lambda_set(model, menu, grid);
      Json doc = lam;
      doc["menu"] = name_a;
      emit(out, doc);
      err << "lambda " << name_a << ": witness slope (";
      for (std::size_t i = 0; i < lam.witness.size(); ++i) {
        if (i) err << ", ";
        err << fmt_short(lam.witness[i]);
      }
      err << "), interval width " << fmt_short(lam.max_width) << "\n";
      return kOk;
    }
    if (*c_iia) {
      const CostModel& model = need_model(pf.cost);
      const Menu& f = find_menu(pf, name_a);
      const Menu& g = find_menu(pf, name_b);
      Grid grid = make_grid(model, pf.resolution, pf.extra_knots);
      AxiomReport rep = check_iia(model, f, g, grid);
      Json doc = rep;
      doc["check"] = "iia";
      doc["menus"] = Json{{"f", name_a}, {"g", name_b}};
      emit(out, doc);
      err << "check-iia " << name_a << " " << name_b << ": " << doc["verdict"].get<std::string>()
          << " (margin " << fmt_short(rep.margin) << ")\n";
      return axiom_exit(rep);
    }
    if (*c_ie) {
      const Menu& menu = find_menu(pf, name_a);
      AxiomReport rep;
      if (pf.cost.is_finite()) {
        rep = check_ie(*pf.cost.finite, menu, pf.resolution);
      } else {
        const CostModel& model = *pf.cost.model;
        Grid grid = make_grid(model, pf.resolution, pf.extra_knots);
        rep = check_ie(model, menu, grid);
      }
      Json doc = rep;
      doc["check"] = "ie";
      doc["menu"] = name_a;
      emit(out, doc);
      err << "check-ie " << name_a << ": " << doc["verdict"].get<std::string>() << " (margin "
          << fmt_short(rep.margin) << ")\n";
      return axiom_exit(rep);
    }
    if (*c_jdd) {
      const CostModel& model = need_model(pf.cost);
      JddReport rep = jdd_check(model, {}, conv, pf.seed);
      Json doc = rep;
      doc["check"] = "jdd";
      emit(out, doc);
      bool bad = rep.verdict == JddReport::Verdict::Violated;
      err << "jdd: " << (bad ? "violated" : "satisfied")
          << (rep.conclusive ? "" : " (not conclusive)") << ", cleared " << rep.cleared.size()
          << " candidate sets\n";
      return bad ? kViolation : kOk;
    }
    if (*c_ce) {
      const CostModel& model = need_model(pf.cost);
      JddReport rep = jdd_check(model, {}, conv, pf.seed);
      if (rep.verdict == JddReport::Verdict::Satisfied) {
        Json doc{{"jdd", rep}, {"counterexample", nullptr}};
        emit(out, doc);
        err << "counterexample: no differentiability failure found, nothing to build\n";
        return kOk;
      }
      CounterexampleReport ce = build_iia_counterexample(model, *rep.certificate, pf.resolution);
      Json doc{{"jdd", rep}, {"counterexample", ce}};
      emit(out, doc);
      err << "counterexample: union value " << fmt_short(ce.value_union)
          << " exceeds the shared level " << fmt_short(ce.value_intersection) << " by "
          << fmt_short(ce.axiom.margin) << " (predicted at least "
          << fmt_short(ce.predicted_lower_bound) << ")\n";
      return kViolation;
    }
    if (*c_recover) {
      const CostModel& model = need_model(pf.cost);
      Grid grid = make_grid(model, pf.resolution, pf.extra_knots);
      RecoveredPsi rec = recover_psi(model, grid);
      emit(out, Json(rec));
      err << "recover: max error " << fmt_short(rec.max_error) << " over "
          << rec.points.size() << " grid points\n";
      return kOk;
    }
    if (*c_plot) {
      const CostModel& model = need_model(pf.cost);
      if (model.chart().dim != 1) {
        throw Error(ErrorCode::NotTwoStates, "plot-data draws two state problems only");
      }
      const Menu& menu = find_menu(pf, name_a);
      Grid grid = make_grid(model, pf.resolution, pf.extra_knots);
      HyperplaneSet lam = lambda_set(model, menu, grid);
      double x0 = model.prior_coord()[0];

      std::vector<std::size_t> order(grid.coords.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return grid.coords[a][0] < grid.coords[b][0];
      });
      std::vector<double> xs, phis, psis, nets;
      for (std::size_t idx : order) {
        double x = grid.coords[idx][0];
        if (!xs.empty() && !(x > xs.back())) continue;
        double phi = menu_phi(menu, grid.points[idx]).value;
        double psi = model.psi(grid.points[idx]);
        xs.push_back(x);
        phis.push_back(phi);
        psis.push_back(psi);
        nets.push_back(phi - psi);
      }
      std::vector<double> cav = upper_envelope(xs, nets);

      std::ostringstream csv;
      csv << "p,phi,psi,net,cav,hyperplane\n";
      for (std::size_t i = 0; i < xs.size(); ++i) {
        double hyper = lam.value + lam.witness[0] * (xs[i] - x0);
        csv << fmt(xs[i]) << "," << fmt(phis[i]) << "," << fmt(psis[i]) << ","
            << fmt(nets[i]) << "," << fmt(cav[i]) << "," << fmt(hyper) << "\n";
      }
      if (out_path.empty()) {
        out << csv.str();
      } else {
        std::ofstream file(out_path, std::ios::binary);
        if (!file) throw Error(ErrorCode::ParseError, out_path + ": cannot open for writing");
        file << csv.str();
      }
      err << "plot-data " << name_a << ": " << xs.size() << " rows"
          << (out_path.empty() ? "" : " -> " + out_path) << "\n";
      return kOk;
    }
    throw Error(ErrorCode::ParseError, "no command given");
  } catch (const Error& e) {
    emit(err, Json{{"error", error_code_name(e.code())}, {"message", e.what()}});
    return kError;
  } catch (const std::exception& e) {
    emit(err, Json{{"error", "internal"}, {"message", e.what()}});
    return kError;
  }
}

}  // namespace ricav
