#ifndef RICAV_SIMPLEX_HPP
#define RICAV_SIMPLEX_HPP

#include <vector>

#include "ricav/beliefs.hpp"

namespace ricav {

// Dense standard-form linear program: optimize c.x subject to A x = b, x >= 0.
// Solved by two-phase primal simplex with Bland's rule throughout, so runs are
// deterministic and cycling cannot occur. Intended shape: few rows (the chart
// dimension plus a handful), up to ~1e4 columns.
struct LpProblem {
  std::size_t m = 0;           // rows
  std::size_t n = 0;           // columns
  std::vector<Vec> cols;       // n columns of length m
  Vec b;                       // length m
  Vec c;                       // length n
  bool maximize = true;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  Vec x;                       // length n
  Vec dual;                    // length m, multipliers for the equality rows
  std::vector<int> basis;
};

LpSolution solve_lp(const LpProblem& lp);

}  // namespace ricav

#endif
