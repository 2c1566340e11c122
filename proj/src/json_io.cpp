#include "ricav/json_io.hpp"

#include <cmath>
#include <fstream>

#include "ricav/errors.hpp"

namespace ricav {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ParseError, where + ": " + what);
}

const Json& need(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where + "." + key, "missing");
  return *it;
}

double as_number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

double field_number(const Json& j, const char* key, const std::string& where) {
  return as_number(need(j, key, where), where + "." + key);
}

double field_number_or(const Json& j, const char* key, const std::string& where, double dflt) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) return dflt;
  return as_number(*it, where + "." + key);
}

Vec as_vec(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  Vec out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(as_number(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Belief belief_from(const Json& j, const std::string& where) {
  Vec w = as_vec(j, where);
  try {
    return make_belief(std::move(w));
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

Json fin(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

const char* verdict_name(AxiomReport::Verdict v) {
  switch (v) {
    case AxiomReport::Verdict::Satisfied: return "satisfied";
    case AxiomReport::Verdict::Violated: return "violated";
    default: return "premise_fails";
  }
}

}  // namespace

ParsedCost make_cost(const Json& spec, const Belief& prior) {
  std::string where = "cost";
  const Json& tj = need(spec, "type", where);
  if (!tj.is_string()) fail(where + ".type", "expected a string");
  std::string type = tj.get<std::string>();
  Json params = spec.contains("params") ? spec["params"] : Json::object();
  if (!params.is_object()) fail(where + ".params", "expected an object");

  ParsedCost out;
  out.type = type;
  try {
    if (type == "entropy") {
      out.model = make_entropy_cost(prior);
    } else if (type == "quadratic") {
      out.model = make_quadratic_cost(prior, field_number_or(params, "weight", where, 1.0));
    } else if (type == "kinked_abs_quad") {
      double w = field_number_or(params, "weight", where, 1.0);
      double q = field_number_or(params, "quad", where, 1.0);
      if (params.contains("kink")) {
        out.model = make_kinked_cost(prior, w, q, as_number(params["kink"], where + ".params.kink"));
      } else {
        out.model = make_kinked_cost(prior, w, q);
      }
    } else if (type == "custom_pwq") {
      const Json& cj = need(params, "cells", where + ".params");
      if (!cj.is_array() || cj.empty()) fail(where + ".params.cells", "expected a nonempty array");
      std::vector<PwqCell> cells;
      for (std::size_t i = 0; i < cj.size(); ++i) {
        std::string cw = where + ".params.cells[" + std::to_string(i) + "]";
        PwqCell cell;
        cell.lo = field_number(cj[i], "lo", cw);
        cell.hi = field_number(cj[i], "hi", cw);
        cell.a = field_number(cj[i], "a", cw);
        cell.b = field_number(cj[i], "b", cw);
        cell.c = field_number(cj[i], "c", cw);
        cells.push_back(cell);
      }
      std::vector<double> kinks;
      if (params.contains("kinks")) {
        kinks = as_vec(params["kinks"], where + ".params.kinks");
      }
      out.model = make_custom_pwq_cost(prior, std::move(cells), std::move(kinks));
    } else if (type == "finite_max") {
      if (prior.size() != 2) fail(where, "finite_max cost needs exactly two states");
      const Json& comps = need(params, "components", where + ".params");
      if (!comps.is_array() || comps.empty()) {
        fail(where + ".params.components", "expected a nonempty array");
      }
      Chart chart = full_simplex_chart(2);
      double x0 = chart.apply(prior)[0];
      std::vector<PsiComponent> components;
      for (std::size_t i = 0; i < comps.size(); ++i) {
        std::string cw = where + ".params.components[" + std::to_string(i) + "]";
        const Json& ctj = need(comps[i], "type", cw);
        if (!ctj.is_string()) fail(cw + ".type", "expected a string");
        std::string ct = ctj.get<std::string>();
        PsiComponent pc;
        if (ct == "zero") {
          pc.label = "zero";
          pc.value = [](const Vec&) { return 0.0; };
          pc.grad_prior = {0.0};
        } else if (ct == "shifted_quadratic") {
          double w = field_number_or(comps[i], "weight", cw, 1.0);
          double k = field_number_or(comps[i], "center", cw, 0.5);
          double o = field_number_or(comps[i], "offset", cw, 0.0);
          pc.label = "shifted_quadratic";
          pc.value = [w, k, o](const Vec& y) { return w * (y[0] - k) * (y[0] - k) + o; };
          pc.grad_prior = {2.0 * w * (x0 - k)};
        } else {
          fail(cw + ".type", "unknown component type '" + ct + "'");
        }
        components.push_back(std::move(pc));
      }
      out.finite = make_finite_psi_model(std::move(components), prior);
    } else {
      fail(where + ".type", "unknown cost type '" + type + "'");
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    fail(where, e.what());
  }
  return out;
}

const Chart& chart_of(const ParsedCost& cost) {
  if (cost.finite) return cost.finite->chart;
  return cost.model->chart();
}

ProblemFile parse_problem(const Json& doc) {
  ProblemFile pf;
  const Json& sj = need(doc, "states", "problem");
  if (!sj.is_array() || sj.empty()) fail("states", "expected a nonempty array of names");
  for (std::size_t i = 0; i < sj.size(); ++i) {
    if (!sj[i].is_string()) fail("states[" + std::to_string(i) + "]", "expected a string");
    pf.states.push_back(sj[i].get<std::string>());
  }
  pf.prior = belief_from(need(doc, "prior", "problem"), "prior");
  if (pf.prior.size() != pf.states.size()) {
    fail("prior", "length differs from the state list");
  }
  pf.cost = make_cost(need(doc, "cost", "problem"), pf.prior);

  const Json& mj = need(doc, "menus", "problem");
  if (!mj.is_object()) fail("menus", "expected an object of named menus");
  for (auto it = mj.begin(); it != mj.end(); ++it) {
    std::string where = "menus." + it.key();
    Menu m = menu_from_json(it.value(), where);
    for (const UtilityAct& a : m.acts) {
      if (a.u.size() != pf.states.size()) fail(where, "act length differs from the state list");
    }
    pf.menus.emplace_back(it.key(), std::move(m));
  }

  if (doc.contains("grid")) {
    const Json& gj = doc["grid"];
    if (!gj.is_object()) fail("grid", "expected an object");
    if (gj.contains("resolution")) {
      double r = as_number(gj["resolution"], "grid.resolution");
      if (r < 2 || r != std::floor(r)) fail("grid.resolution", "expected an integer >= 2");
      pf.resolution = static_cast<std::size_t>(r);
    }
    if (gj.contains("extra_knots")) {
      const Json& kj = gj["extra_knots"];
      if (!kj.is_array()) fail("grid.extra_knots", "expected an array of beliefs");
      const Chart& chart = chart_of(pf.cost);
      for (std::size_t i = 0; i < kj.size(); ++i) {
        Belief b = belief_from(kj[i], "grid.extra_knots[" + std::to_string(i) + "]");
        pf.extra_knots.push_back(chart.apply(b));
      }
    }
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) fail("seed", "expected a nonnegative integer");
    pf.seed = doc["seed"].get<uint64_t>();
  }
  return pf;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, path + ": cannot open");
  Json doc;
  try {
    in >> doc;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
  return parse_problem(doc);
}

const Menu& find_menu(const ProblemFile& pf, const std::string& name) {
  for (const auto& [n, m] : pf.menus) {
    if (n == name) return m;
  }
  throw Error(ErrorCode::UnknownMenu, "no menu named '" + name + "' in the problem file");
}

void to_json(Json& j, const Belief& p) { j = p.w; }

void to_json(Json& j, const UtilityAct& a) {
  j = Json{{"label", a.label}, {"u", a.u}};
}

void to_json(Json& j, const Menu& m) { j = m.acts; }

void to_json(Json& j, const PosteriorDistribution& pi) {
  j = Json{{"support", pi.support}, {"probs", pi.probs}, {"prior", pi.prior}};
}

void to_json(Json& j, const Polytope& poly) { j = Json{{"vertices", poly.vertices}}; }

void to_json(Json& j, const SolveReport& r) {
  j = Json{{"value", r.value},
           {"gross_payoff", r.gross_payoff},
           {"info_cost", r.info_cost},
           {"pi", r.pi},
           {"assignments", r.assignments},
           {"grid_points", r.grid_points},
           {"runtime_seconds", r.runtime_seconds}};
}

void to_json(Json& j, const LambdaInterval& iv) {
  j = Json{{"direction", iv.direction}, {"lo", fin(iv.lo)}, {"hi", fin(iv.hi)},
           {"exact", iv.exact}};
}

void to_json(Json& j, const HyperplaneSet& h) {
  j = Json{{"value", h.value},
           {"level", h.level},
           {"grid_value", h.grid_value},
           {"witness", h.witness},
           {"intervals", h.intervals},
           {"max_width", fin(h.max_width)},
           {"exact", h.exact}};
}

void to_json(Json& j, const NdisdCertificate& c) {
  j = Json{{"points", c.points},
           {"coords", c.coords},
           {"lambdas", c.lambdas},
           {"delta", c.delta},
           {"hull_weights", c.hull_weights},
           {"residuals",
            Json{{"subgrad", c.subgrad_residual},
                 {"orth", c.orth_residual},
                 {"hull", c.hull_residual}}}};
}

void to_json(Json& j, const JddReport& r) {
  j = Json{{"verdict", r.verdict == JddReport::Verdict::Violated ? "violated" : "satisfied"},
           {"conclusive", r.conclusive},
           {"certificate", nullptr},
           {"cleared", r.cleared},
           {"skipped", r.skipped}};
  if (r.certificate) j["certificate"] = *r.certificate;
}

void to_json(Json& j, const HMenuResult& r) {
  j = Json{{"menu", r.menu},
           {"value", r.value},
           {"zero_supported", r.zero_supported},
           {"neg_delta_supported", r.neg_delta_supported},
           {"neg_delta_checked", r.neg_delta_checked},
           {"orth_residual", r.orth_residual}};
}

void to_json(Json& j, const AxiomReport& r) {
  Json pv = Json::object();
  for (const auto& [name, v] : r.premise_values) pv[name] = v;
  j = Json{{"verdict", verdict_name(r.verdict)},
           {"premise_values", pv},
           {"premise_holds", r.premise_holds},
           {"premise_residual", r.premise_residual},
           {"conclusion_value", r.conclusion_value},
           {"margin", r.margin},
           {"witness", nullptr},
           {"note", r.note}};
  if (r.witness) j["witness"] = *r.witness;
}

void to_json(Json& j, const CounterexampleReport& r) {
  j = Json{{"certificate", r.certificate},
           {"epsilon", r.epsilon},
           {"menus", Json{{"H", r.h}, {"F", r.f}, {"G", r.g}}},
           {"values",
            Json{{"H", r.value_h},
                 {"F", r.value_f},
                 {"G", r.value_g},
                 {"intersection", r.value_intersection},
                 {"union", r.value_union}}},
           {"predicted_lower_bound", r.predicted_lower_bound},
           {"axiom", r.axiom}};
}

void to_json(Json& j, const RecoveredPsi& r) {
  j = Json{{"points", r.points},
           {"recovered", r.recovered},
           {"actual", r.actual},
           {"max_error", r.max_error},
           {"tangent_count", r.tangents.size()},
           {"all_irrelevant", r.all_irrelevant}};
}

UtilityAct act_from_json(const Json& j, const std::string& where) {
  if (j.is_array()) return make_act(as_vec(j, where));
  if (j.is_object()) {
    std::string label;
    if (j.contains("label")) {
      if (!j["label"].is_string()) fail(where + ".label", "expected a string");
      label = j["label"].get<std::string>();
    }
    return make_act(as_vec(need(j, "u", where), where + ".u"), label);
  }
  fail(where, "expected an act (array of utilities or {label, u})");
}

Menu menu_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a nonempty array of acts");
  std::vector<UtilityAct> acts;
  for (std::size_t i = 0; i < j.size(); ++i) {
    acts.push_back(act_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  }
  try {
    return make_menu(std::move(acts));
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

NdisdCertificate certificate_from_json(const Json& j) {
  std::string where = "certificate";
  NdisdCertificate c;
  const Json& pj = need(j, "points", where);
  if (!pj.is_array() || pj.empty()) fail(where + ".points", "expected a nonempty array");
  for (std::size_t i = 0; i < pj.size(); ++i) {
    c.points.push_back(belief_from(pj[i], where + ".points[" + std::to_string(i) + "]"));
  }
  const Json& cj = need(j, "coords", where);
  for (std::size_t i = 0; i < cj.size(); ++i) {
    c.coords.push_back(as_vec(cj[i], where + ".coords[" + std::to_string(i) + "]"));
  }
  const Json& lj = need(j, "lambdas", where);
  for (std::size_t i = 0; i < lj.size(); ++i) {
    c.lambdas.push_back(as_vec(lj[i], where + ".lambdas[" + std::to_string(i) + "]"));
  }
  c.delta = as_vec(need(j, "delta", where), where + ".delta");
  if (j.contains("hull_weights")) {
    c.hull_weights = as_vec(j["hull_weights"], where + ".hull_weights");
  }
  if (j.contains("residuals") && j["residuals"].is_object()) {
    const Json& rj = j["residuals"];
    c.subgrad_residual = field_number_or(rj, "subgrad", where + ".residuals", 0.0);
    c.orth_residual = field_number_or(rj, "orth", where + ".residuals", 0.0);
    c.hull_residual = field_number_or(rj, "hull", where + ".residuals", 0.0);
  }
  return c;
}

}  // namespace ricav
