#ifndef RICAV_JSON_IO_HPP
#define RICAV_JSON_IO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ricav/costs.hpp"
#include "ricav/diagnostics.hpp"
#include "ricav/menus.hpp"
#include "ricav/solver.hpp"

namespace ricav {

using Json = nlohmann::json;

// Either a canonical cost model or the max-of-components family; the latter
// is consumed only by the ignorance-equivalent check.
struct ParsedCost {
  CostPtr model;
  std::optional<FinitePsiModel> finite;
  std::string type;

  bool is_finite() const { return finite.has_value(); }
};

// Cost spec: {"type": ..., "params": {...}}. Types: entropy, quadratic
// (weight), kinked_abs_quad (weight, quad, optional kink), custom_pwq
// (cells [{lo,hi,a,b,c}], kinks [..]), finite_max (components, two states).
ParsedCost make_cost(const Json& spec, const Belief& prior);

const Chart& chart_of(const ParsedCost& cost);

struct ProblemFile {
  std::vector<std::string> states;
  Belief prior;
  ParsedCost cost;
  std::vector<std::pair<std::string, Menu>> menus;
  std::size_t resolution = 257;
  std::vector<Vec> extra_knots;  // chart coordinates of the declared knots
  uint64_t seed = kProbeSeed;
};

ProblemFile parse_problem(const Json& doc);
ProblemFile load_problem(const std::string& path);
const Menu& find_menu(const ProblemFile& pf, const std::string& name);

// Report serialization. Unbounded interval ends become null.
void to_json(Json& j, const Belief& p);
void to_json(Json& j, const UtilityAct& a);
void to_json(Json& j, const Menu& m);
void to_json(Json& j, const PosteriorDistribution& pi);
void to_json(Json& j, const Polytope& poly);
void to_json(Json& j, const SolveReport& r);
void to_json(Json& j, const LambdaInterval& iv);
void to_json(Json& j, const HyperplaneSet& h);
void to_json(Json& j, const NdisdCertificate& c);
void to_json(Json& j, const JddReport& r);
void to_json(Json& j, const HMenuResult& r);
void to_json(Json& j, const AxiomReport& r);
void to_json(Json& j, const CounterexampleReport& r);
void to_json(Json& j, const RecoveredPsi& r);

// Replay side: rebuild inputs from their serialized form.
UtilityAct act_from_json(const Json& j, const std::string& where);
Menu menu_from_json(const Json& j, const std::string& where);
NdisdCertificate certificate_from_json(const Json& j);

}  // namespace ricav

#endif
