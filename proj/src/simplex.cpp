#include "ricav/simplex.hpp"

#include <algorithm>
#include <cmath>

#include "ricav/errors.hpp"

namespace ricav {

namespace {

constexpr double kReducedCostTol = 1e-10;
constexpr double kPivotTol = 1e-11;
constexpr double kPhase1Tol = 1e-8;

// Invert the current basis matrix by Gauss-Jordan with partial pivoting.
// m stays tiny here (chart dimension plus a few rows), so a fresh inversion
// per pivot is cheaper than bookkeeping eta files.
std::vector<Vec> invert(const std::vector<Vec>& cols, const std::vector<int>& basis,
                        std::size_t m) {
  std::vector<Vec> a(m, Vec(2 * m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t r = 0; r < m; ++r) a[r][i] = cols[basis[i]][r];
    a[i][m + i] = 1.0;
  }
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) < 1e-14) {
      throw Error(ErrorCode::SolverError, "singular basis matrix");
    }
    std::swap(a[col], a[piv]);
    double inv = 1.0 / a[col][col];
    for (std::size_t j = col; j < 2 * m; ++j) a[col][j] *= inv;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col) continue;
      double f = a[r][col];
      if (f == 0.0) continue;
      for (std::size_t j = col; j < 2 * m; ++j) a[r][j] -= f * a[col][j];
    }
  }
  std::vector<Vec> binv(m, Vec(m));
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < m; ++j) binv[r][j] = a[r][m + j];
  }
  return binv;
}

struct Tableau {
  const std::vector<Vec>* cols;
  Vec cost;                 // phase-specific
  std::size_t m, n_total, n_real;
  std::vector<int> basis;   // size m
  Vec xb;                   // basic values, size m
  Vec b;

  Vec multipliers(const std::vector<Vec>& binv) const {
    Vec y(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t r = 0; r < m; ++r) y[r] += cost[basis[i]] * binv[i][r];
    }
    return y;
  }
};

// Returns false when unbounded. Bland's rule: entering is the lowest-index
// attractive column, leaving is the min-ratio row breaking ties by lowest
// basis variable index.
bool run_simplex(Tableau& t, bool allow_artificial_entering) {
  for (;;) {
    std::vector<Vec> binv = invert(*t.cols, t.basis, t.m);
    Vec y = t.multipliers(binv);

    int entering = -1;
    std::size_t limit = allow_artificial_entering ? t.n_total : t.n_real;
    for (std::size_t j = 0; j < limit; ++j) {
      if (std::find(t.basis.begin(), t.basis.end(), static_cast<int>(j)) != t.basis.end()) {
        continue;
      }
      double red = t.cost[j];
      for (std::size_t r = 0; r < t.m; ++r) red -= y[r] * (*t.cols)[j][r];
      if (red < -kReducedCostTol) {
        entering = static_cast<int>(j);
        break;
      }
    }
    if (entering < 0) return true;  // optimal

    Vec dir(t.m, 0.0);
    for (std::size_t i = 0; i < t.m; ++i) {
      for (std::size_t r = 0; r < t.m; ++r) dir[i] += binv[i][r] * (*t.cols)[entering][r];
    }

    int leave = -1;
    double best_ratio = 0.0;
    for (std::size_t i = 0; i < t.m; ++i) {
      if (dir[i] > kPivotTol) {
        double ratio = t.xb[i] / dir[i];
        if (leave < 0 || ratio < best_ratio - 1e-13 ||
            (ratio < best_ratio + 1e-13 && t.basis[i] < t.basis[leave])) {
          leave = static_cast<int>(i);
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) return false;  // unbounded

    t.basis[leave] = entering;
    std::vector<Vec> binv2 = invert(*t.cols, t.basis, t.m);
    for (std::size_t i = 0; i < t.m; ++i) {
      double v = 0.0;
      for (std::size_t r = 0; r < t.m; ++r) v += binv2[i][r] * t.b[r];
      t.xb[i] = std::max(v, 0.0);
    }
  }
}

}  // namespace

LpSolution solve_lp(const LpProblem& lp) {
  const std::size_t m = lp.m, n = lp.n;
  LpSolution out;

  // internal convention: minimize
  Vec row_sign(m, 1.0);
  Vec b = lp.b;
  for (std::size_t i = 0; i < m; ++i) {
    if (b[i] < 0.0) {
      b[i] = -b[i];
      row_sign[i] = -1.0;
    }
  }
  std::vector<Vec> cols(n + m, Vec(m, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) cols[j][i] = row_sign[i] * lp.cols[j][i];
  }
  for (std::size_t i = 0; i < m; ++i) cols[n + i][i] = 1.0;  // artificials

  Tableau t;
  t.cols = &cols;
  t.m = m;
  t.n_total = n + m;
  t.n_real = n;
  t.b = b;
  t.basis.resize(m);
  t.xb = b;
  for (std::size_t i = 0; i < m; ++i) t.basis[i] = static_cast<int>(n + i);

  // phase 1
  t.cost.assign(n + m, 0.0);
  for (std::size_t i = 0; i < m; ++i) t.cost[n + i] = 1.0;
  if (!run_simplex(t, false)) {
    throw Error(ErrorCode::SolverError, "phase 1 reported unbounded");
  }
  double infeas = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (t.basis[i] >= static_cast<int>(n)) infeas += t.xb[i];
  }
  if (infeas > kPhase1Tol) {
    out.status = LpStatus::Infeasible;
    return out;
  }

  // drive artificials out where a real pivot exists; leftovers sit on
  // redundant rows and are barred from re-entering
  for (std::size_t i = 0; i < m; ++i) {
    if (t.basis[i] < static_cast<int>(n)) continue;
    std::vector<Vec> binv = invert(cols, t.basis, m);
    for (std::size_t j = 0; j < n; ++j) {
      if (std::find(t.basis.begin(), t.basis.end(), static_cast<int>(j)) != t.basis.end()) {
        continue;
      }
      double piv = 0.0;
      for (std::size_t r = 0; r < m; ++r) piv += binv[i][r] * cols[j][r];
      if (std::abs(piv) > 1e-9) {
        t.basis[i] = static_cast<int>(j);
        break;
      }
    }
  }
  {
    std::vector<Vec> binv = invert(cols, t.basis, m);
    for (std::size_t i = 0; i < m; ++i) {
      double v = 0.0;
      for (std::size_t r = 0; r < m; ++r) v += binv[i][r] * b[r];
      t.xb[i] = std::max(v, 0.0);
    }
  }

  // phase 2
  t.cost.assign(n + m, 0.0);
  for (std::size_t j = 0; j < n; ++j) t.cost[j] = lp.maximize ? -lp.c[j] : lp.c[j];
  if (!run_simplex(t, false)) {
    out.status = LpStatus::Unbounded;
    return out;
  }

  out.status = LpStatus::Optimal;
  out.x.assign(n, 0.0);
  double value = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (t.basis[i] < static_cast<int>(n)) {
      out.x[t.basis[i]] = t.xb[i];
      value += t.cost[t.basis[i]] * t.xb[i];
    }
  }
  out.value = lp.maximize ? -value : value;
  std::vector<Vec> binv = invert(cols, t.basis, m);
  Vec y = t.multipliers(binv);
  out.dual.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double yi = y[i] * row_sign[i];
    out.dual[i] = lp.maximize ? -yi : yi;
  }
  out.basis = t.basis;
  return out;
}

}  // namespace ricav
