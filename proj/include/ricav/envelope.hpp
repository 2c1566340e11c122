#pragma once

#include <cstddef>
#include <vector>

#include "ricav/beliefs.hpp"
#include "ricav/costs.hpp"
#include "ricav/menus.hpp"

namespace ricav {

// One piece of the net payoff N(y) = phi(y) - psibar(y) for a two-state
// piecewise-quadratic cost: N(y) = A y^2 + B y + C on [lo, hi], where the
// best act is constant (index into the menu).
struct NetPiece {
  double lo, hi;
  double A, B, C;
  std::size_t act;

  double eval(double y) const { return (A * y + B) * y + C; }
  double slope(double y) const { return 2.0 * A * y + B; }
};

struct PiecewiseNet {
  std::vector<NetPiece> pieces;

  double lo() const { return pieces.front().lo; }
  double hi() const { return pieces.back().hi; }
  double eval(double y) const;
};

// Splits the chart interval at cost-cell edges, act crossings, and the given
// extra points, then picks the best act on each piece. Requires a 1-D
// piecewise-quadratic cost.
PiecewiseNet build_piecewise_net(const CostModel& model, const Menu& menu,
                                 const std::vector<double>& extra_breaks = {});

// Extremal difference quotients of N against the anchor (x0, v):
//   sup_right = sup over y > x0 of (N(y) - v) / (y - x0)
//   inf_left  = inf over y < x0 of (N(y) - v) / (y - x0)
// Computed per piece in closed form. When v == N(x0) the one-sided slopes at
// x0 enter as limits. x0 must be a piece boundary of the net.
void difference_quotient_range(const PiecewiseNet& net, double x0, double v, double* sup_right,
                               double* inf_left);

struct Cav1dResult {
  double value;                 // concave envelope of N at the prior
  double slope;                 // slope of the minimal supporting line
  std::vector<double> contacts; // all touch points of that line, sorted
  Vec support_coords;           // chart coordinates of the optimal posteriors
  Vec weights;
};

// Exact concave envelope at the prior by supporting-line enumeration:
// chords through partition points, tangents from partition points to pieces,
// common tangents of piece pairs, flat linear pieces, and the stay-put line.
// Every candidate is checked for global domination before it can win.
Cav1dResult concavify_1d_exact(const CostModel& model, const Menu& menu);

}  // namespace ricav
