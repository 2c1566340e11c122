#pragma once

#include <cstddef>
#include <vector>

#include "ricav/beliefs.hpp"
#include "ricav/costs.hpp"
#include "ricav/menus.hpp"

namespace ricav {

inline constexpr double kTolWidth = 1e-6;   // certified interval width
inline constexpr double kValueTol = 1e-7;   // value comparisons between methods
inline constexpr double kSupportDrop = 1e-12;

struct SolveReport {
  double value = 0.0;         // gross payoff minus information cost at the optimum
  double gross_payoff = 0.0;
  double info_cost = 0.0;
  PosteriorDistribution pi;   // optimal attention strategy
  std::vector<std::size_t> assignments;  // chosen act per support posterior
  std::size_t grid_points = 0;
  double runtime_seconds = 0.0;
};

SolveReport solve_menu(const CostModel& model, const Menu& menu, const Grid& grid);
SolveReport solve_menu(const CostModel& model, const Menu& menu, std::size_t resolution);

// One slab of the optimal-slope set along a probe direction:
// { lambda . direction : lambda admissible } = [lo, hi].
struct LambdaInterval {
  Vec direction;
  double lo = 0.0;
  double hi = 0.0;
  bool exact = false;  // endpoints from the closed-form 1-D refinement
};

struct HyperplaneSet {
  double value = 0.0;       // refined problem value when a 1-D oracle exists
  double level = 0.0;       // intercept k with witness . prior_coord + k = value
  double grid_value = 0.0;  // LP value on the grid (lower bound on value)
  Vec witness;              // one admissible slope, minimal norm along the first axis
  std::vector<LambdaInterval> intervals;
  double max_width = 0.0;
  bool exact = false;       // every interval endpoint certified
};

HyperplaneSet lambda_set(const CostModel& model, const Menu& menu, const Grid& grid);
HyperplaneSet lambda_set(const CostModel& model, const Menu& menu, std::size_t resolution);

// True when value + lambda . (y - prior) >= net(y) at every grid coordinate.
bool lambda_supports(const std::vector<double>& net, const std::vector<Vec>& coords,
                     const Vec& prior_coord, double value, const Vec& lambda, double tol);

// Net payoff N at every grid coordinate: menu envelope minus cost.
std::vector<double> net_on_grid(const CostModel& model, const Menu& menu, const Grid& grid);

}  // namespace ricav
