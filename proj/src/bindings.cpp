#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <sstream>

#include "ricav/cli.hpp"
#include "ricav/diagnostics.hpp"
#include "ricav/errors.hpp"
#include "ricav/json_io.hpp"
#include "ricav/solver.hpp"

namespace py = pybind11;

namespace ricav {
namespace {

py::object json_to_py(const Json& j) {
  using value_t = Json::value_t;
  switch (j.type()) {
    case value_t::null:
      return py::none();
    case value_t::boolean:
      return py::bool_(j.get<bool>());
    case value_t::number_integer:
      return py::int_(j.get<long long>());
    case value_t::number_unsigned:
      return py::int_(j.get<unsigned long long>());
    case value_t::number_float:
      return py::float_(j.get<double>());
    case value_t::string:
      return py::str(j.get<std::string>());
    case value_t::array: {
      py::list out;
      for (const auto& v : j) out.append(json_to_py(v));
      return out;
    }
    case value_t::object: {
      py::dict out;
      for (auto it = j.begin(); it != j.end(); ++it) {
        out[py::str(it.key())] = json_to_py(it.value());
      }
      return out;
    }
    default:
      return py::none();
  }
}

// Thin ownership wrapper; keeps the const shared_ptr out of the holder type.
struct PyCost {
  CostPtr ptr;
};

OrthConvention conv_of(const std::string& orth) {
  return orth == "absolute" ? OrthConvention::Absolute : OrthConvention::Shifted;
}

}  // namespace
}  // namespace ricav

PYBIND11_MODULE(_core, m) {
  using namespace ricav;
  m.doc() = "concavification solver and smoothness diagnostics for costly information";

  py::register_exception<Error>(m, "Error");

  py::class_<PyCost>(m, "Cost", "posterior separable information cost");
  py::class_<Menu>(m, "Menu", "finite set of state contingent utility acts");

  m.def(
      "entropy_cost",
      [](const Vec& prior) { return PyCost{make_entropy_cost(make_belief(prior))}; },
      py::arg("prior"));
  m.def(
      "quadratic_cost",
      [](const Vec& prior, double weight) {
        return PyCost{make_quadratic_cost(make_belief(prior), weight)};
      },
      py::arg("prior"), py::arg("weight") = 1.0);
  m.def(
      "kinked_cost",
      [](const Vec& prior, double weight, double quad) {
        return PyCost{make_kinked_cost(make_belief(prior), weight, quad)};
      },
      py::arg("prior"), py::arg("weight") = 1.0, py::arg("quad") = 1.0);
  m.def(
      "kinked_cost_at",
      [](const Vec& prior, double weight, double quad, double kink) {
        return PyCost{make_kinked_cost(make_belief(prior), weight, quad, kink)};
      },
      py::arg("prior"), py::arg("weight"), py::arg("quad"), py::arg("kink"));
  m.def(
      "custom_pwq_cost",
      [](const Vec& prior, const std::vector<std::array<double, 5>>& cells, const Vec& kinks) {
        std::vector<PwqCell> cs;
        for (const auto& row : cells) {
          PwqCell c;
          c.lo = row[0];
          c.hi = row[1];
          c.a = row[2];
          c.b = row[3];
          c.c = row[4];
          cs.push_back(c);
        }
        return PyCost{make_custom_pwq_cost(make_belief(prior), std::move(cs), kinks)};
      },
      py::arg("prior"), py::arg("cells"), py::arg("kinks"),
      "cells are (lo, hi, a, b, c) rows meaning a*y^2 + b*y + c on [lo, hi]");

  m.def(
      "menu",
      [](const std::vector<std::pair<std::string, Vec>>& rows) {
        std::vector<UtilityAct> acts;
        for (const auto& [label, u] : rows) acts.push_back(make_act(u, label));
        return make_menu(std::move(acts));
      },
      py::arg("acts"), "acts as (label, utilities) pairs");
  m.def(
      "menu",
      [](const std::vector<Vec>& rows) {
        std::vector<UtilityAct> acts;
        for (const Vec& u : rows) acts.push_back(make_act(u));
        return make_menu(std::move(acts));
      },
      py::arg("acts"), "acts as plain utility vectors");

  m.def(
      "psi",
      [](const PyCost& c, const Vec& p) { return c.ptr->psi(make_belief(p)); },
      py::arg("cost"), py::arg("belief"), "canonical cost of holding a posterior");

  m.def(
      "solve",
      [](const PyCost& c, const Menu& menu, std::size_t resolution,
         const std::vector<Vec>& extra_knots) {
        Grid grid = make_grid(*c.ptr, resolution, extra_knots);
        return json_to_py(Json(solve_menu(*c.ptr, menu, grid)));
      },
      py::arg("cost"), py::arg("menu"), py::arg("resolution") = 257,
      py::arg("extra_knots") = std::vector<Vec>{});
  m.def(
      "lambda_set",
      [](const PyCost& c, const Menu& menu, std::size_t resolution,
         const std::vector<Vec>& extra_knots) {
        Grid grid = make_grid(*c.ptr, resolution, extra_knots);
        return json_to_py(Json(lambda_set(*c.ptr, menu, grid)));
      },
      py::arg("cost"), py::arg("menu"), py::arg("resolution") = 257,
      py::arg("extra_knots") = std::vector<Vec>{});
  m.def(
      "jdd",
      [](const PyCost& c, std::uint64_t seed, const std::string& orth) {
        return json_to_py(Json(jdd_check(*c.ptr, {}, conv_of(orth), seed)));
      },
      py::arg("cost"), py::arg("seed") = kProbeSeed, py::arg("orth") = "shifted");
  m.def(
      "counterexample",
      [](const PyCost& c, std::size_t resolution, std::uint64_t seed,
         const std::string& orth) -> py::object {
        JddReport rep = jdd_check(*c.ptr, {}, conv_of(orth), seed);
        if (rep.verdict != JddReport::Verdict::Violated) return py::none();
        return json_to_py(Json(build_iia_counterexample(*c.ptr, *rep.certificate, resolution)));
      },
      py::arg("cost"), py::arg("resolution") = 257, py::arg("seed") = kProbeSeed,
      py::arg("orth") = "shifted");
  m.def(
      "check_iia",
      [](const PyCost& c, const Menu& f, const Menu& g, std::size_t resolution) {
        Grid grid = make_grid(*c.ptr, resolution, {});
        return json_to_py(Json(check_iia(*c.ptr, f, g, grid)));
      },
      py::arg("cost"), py::arg("f"), py::arg("g"), py::arg("resolution") = 257);
  m.def(
      "check_ie",
      [](const PyCost& c, const Menu& menu, std::size_t resolution) {
        Grid grid = make_grid(*c.ptr, resolution, {});
        return json_to_py(Json(check_ie(*c.ptr, menu, grid)));
      },
      py::arg("cost"), py::arg("menu"), py::arg("resolution") = 257);
  m.def(
      "recover",
      [](const PyCost& c, std::size_t resolution) {
        Grid grid = make_grid(*c.ptr, resolution, {});
        return json_to_py(Json(recover_psi(*c.ptr, grid)));
      },
      py::arg("cost"), py::arg("resolution") = 257);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "run the command line driver, returns (exit_code, stdout, stderr)");
}
