#include "ricav/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "ricav/envelope.hpp"
#include "ricav/errors.hpp"
#include "ricav/rng.hpp"
#include "ricav/simplex.hpp"

namespace ricav {

std::vector<double> net_on_grid(const CostModel& model, const Menu& menu, const Grid& grid) {
  if (menu.acts.empty()) throw Error(ErrorCode::EmptyMenu, "menu has no acts");
  for (const UtilityAct& f : menu.acts) {
    if (f.u.size() != model.chart().states) {
      throw Error(ErrorCode::BadAct, "act has wrong state count");
    }
  }
  std::vector<double> net(grid.points.size());
  for (std::size_t j = 0; j < grid.points.size(); ++j) {
    double psi = model.psi(grid.points[j]);
    if (!(psi < kInf)) throw Error(ErrorCode::InfeasibleGrid, "grid point outside the domain");
    net[j] = menu_phi(menu, grid.points[j]).value - psi;
  }
  return net;
}

SolveReport solve_menu(const CostModel& model, const Menu& menu, const Grid& grid) {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<double> net = net_on_grid(model, menu, grid);
  const Vec& x0 = model.prior_coord();
  const std::size_t M = x0.size();
  const std::size_t K = grid.coords.size();

  LpProblem lp;
  lp.m = M + 1;
  lp.n = K;
  lp.maximize = true;
  lp.c = net;
  lp.b = x0;
  lp.b.push_back(1.0);
  lp.cols.reserve(K);
  for (const Vec& y : grid.coords) {
    Vec col = y;
    col.push_back(1.0);
    lp.cols.push_back(std::move(col));
  }
  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal) {
    throw Error(ErrorCode::SolverError, "concavification program did not solve");
  }

  SolveReport rep;
  rep.grid_points = K;
  rep.value = sol.value;

  std::vector<Belief> support;
  std::vector<double> probs;
  std::vector<std::size_t> point_index;
  for (std::size_t j = 0; j < K; ++j) {
    if (sol.x[j] > kSupportDrop) {
      support.push_back(grid.points[j]);
      probs.push_back(sol.x[j]);
      point_index.push_back(j);
    }
  }
  double mass = 0.0;
  for (double p : probs) mass += p;
  for (double& p : probs) p /= mass;
  rep.pi = make_posterior_distribution(support, probs, model.prior());
  for (std::size_t i = 0; i < rep.pi.support.size(); ++i) {
    PhiValue pv = menu_phi(menu, rep.pi.support[i]);
    rep.assignments.push_back(pv.argmax.front());
    rep.gross_payoff += rep.pi.probs[i] * pv.value;
    rep.info_cost += rep.pi.probs[i] * model.psi(rep.pi.support[i]);
  }
  (void)point_index;
  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

SolveReport solve_menu(const CostModel& model, const Menu& menu, std::size_t resolution) {
  Grid grid = make_grid(model, resolution);
  return solve_menu(model, menu, grid);
}

bool lambda_supports(const std::vector<double>& net, const std::vector<Vec>& coords,
                     const Vec& prior_coord, double value, const Vec& lambda, double tol) {
  for (std::size_t j = 0; j < coords.size(); ++j) {
    double h = value;
    for (std::size_t i = 0; i < prior_coord.size(); ++i) {
      h += lambda[i] * (coords[j][i] - prior_coord[i]);
    }
    if (h < net[j] - tol) return false;
  }
  return true;
}

namespace {

// sup of direction . lambda over the grid outer set, by the conic dual:
//   -max { sum_j u_j (net_j - value) : sum_j u_j (y_j - x0) = -direction, u >= 0 }
double grid_support(const std::vector<double>& net, const std::vector<Vec>& coords, const Vec& x0,
                    double value, const Vec& dir) {
  const std::size_t M = x0.size();
  const std::size_t K = coords.size();
  LpProblem lp;
  lp.m = M;
  lp.n = K;
  lp.maximize = true;
  lp.b.resize(M);
  for (std::size_t i = 0; i < M; ++i) lp.b[i] = -dir[i];
  lp.c.resize(K);
  lp.cols.reserve(K);
  for (std::size_t j = 0; j < K; ++j) {
    lp.c[j] = net[j] - value;
    Vec col(M);
    for (std::size_t i = 0; i < M; ++i) col[i] = coords[j][i] - x0[i];
    lp.cols.push_back(std::move(col));
  }
  LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::Infeasible) return kInf;
  if (sol.status == LpStatus::Unbounded) {
    throw Error(ErrorCode::InfeasibleGrid, "no admissible slope over this grid");
  }
  return -sol.value;
}

struct EntropyEnv {
  std::vector<double> alpha, beta;
  double x0;
  const CostModel* model;

  // Q(lambda) = sup_y [ net(y) + lambda (x0 - y) ], convex in lambda
  double q(double lam) const {
    double best = -kInf;
    for (std::size_t f = 0; f < alpha.size(); ++f) {
      best = std::max(best, model->conjugate(alpha[f] - lam).value + beta[f]);
    }
    return lam * x0 + best;
  }

  // subderivative interval of Q
  void dq(double lam, double* lo, double* hi) const {
    double best = -kInf;
    std::vector<double> vals(alpha.size());
    for (std::size_t f = 0; f < alpha.size(); ++f) {
      vals[f] = model->conjugate(alpha[f] - lam).value + beta[f];
      best = std::max(best, vals[f]);
    }
    *lo = kInf;
    *hi = -kInf;
    double tol = 1e-12 * (1.0 + std::abs(best));
    for (std::size_t f = 0; f < alpha.size(); ++f) {
      if (vals[f] < best - tol) continue;
      ConjEval ce = model->conjugate(alpha[f] - lam);
      *lo = std::min(*lo, x0 - ce.ymax);
      *hi = std::max(*hi, x0 - ce.ymin);
    }
  }
};

// refined value and slope interval for a smooth two-state cost with an exact
// conjugate: minimize Q, then walk the flat bottom of its sublevel set
void refine_smooth_conjugate(const CostModel& model, const Menu& menu, double* value, double* lam_lo,
                             double* lam_hi) {
  EntropyEnv env;
  env.model = &model;
  env.x0 = model.prior_coord()[0];
  const Chart& ch = model.chart();
  for (const UtilityAct& f : menu.acts) {
    double a = 0.0, b = 0.0;
    for (std::size_t s = 0; s < ch.states; ++s) {
      a += f.u[s] * ch.C[s][0];
      b += f.u[s] * ch.d[s];
    }
    env.alpha.push_back(a);
    env.beta.push_back(b);
  }

  double L = 1.0;
  for (double a : env.alpha) L = std::max(L, 2.0 * std::abs(a) + 1.0);
  double dlo, dhi;
  for (int i = 0; i < 80; ++i) {
    env.dq(-L, &dlo, &dhi);
    if (dhi < 0.0) break;
    L *= 2.0;
  }
  double R = L;
  for (int i = 0; i < 80; ++i) {
    env.dq(R, &dlo, &dhi);
    if (dlo > 0.0) break;
    R *= 2.0;
  }
  double a = -L, b = R;
  double lam_star = 0.5 * (a + b);
  for (int i = 0; i < 200; ++i) {
    lam_star = 0.5 * (a + b);
    env.dq(lam_star, &dlo, &dhi);
    if (dlo <= 0.0 && dhi >= 0.0) break;
    if (dhi < 0.0) {
      a = lam_star;
    } else {
      b = lam_star;
    }
  }
  double v = env.q(lam_star);
  *value = v;

  // argmin edges by subderivative sign. The subderivative crosses zero
  // linearly where the value bottom is only quadratically flat, so sign
  // bisection pins the edges to machine precision; a genuinely flat bottom
  // keeps its full width because the sign stays zero across it.
  double a2 = -L, b2 = R;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (a2 + b2);
    env.dq(mid, &dlo, &dhi);
    if (dlo > 0.0) {
      b2 = mid;
    } else {
      a2 = mid;
    }
  }
  *lam_hi = 0.5 * (a2 + b2);
  a2 = -L;
  b2 = R;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (a2 + b2);
    env.dq(mid, &dlo, &dhi);
    if (dhi < 0.0) {
      a2 = mid;
    } else {
      b2 = mid;
    }
  }
  *lam_lo = 0.5 * (a2 + b2);
}

}  // namespace

HyperplaneSet lambda_set(const CostModel& model, const Menu& menu, const Grid& grid) {
  std::vector<double> net = net_on_grid(model, menu, grid);
  const Vec& x0 = model.prior_coord();
  const std::size_t M = x0.size();
  const std::size_t K = grid.coords.size();

  // grid value of the concavification program, and its dual slope: the
  // multipliers of the barycenter rows are an admissible grid slope
  double vgrid;
  Vec dual_slope(M, 0.0);
  {
    LpProblem lp;
    lp.m = M + 1;
    lp.n = K;
    lp.maximize = true;
    lp.c = net;
    lp.b = x0;
    lp.b.push_back(1.0);
    lp.cols.reserve(K);
    for (const Vec& y : grid.coords) {
      Vec col = y;
      col.push_back(1.0);
      lp.cols.push_back(std::move(col));
    }
    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) {
      throw Error(ErrorCode::SolverError, "concavification program did not solve");
    }
    vgrid = sol.value;
    for (std::size_t i = 0; i < M && i < sol.dual.size(); ++i) dual_slope[i] = sol.dual[i];
  }

  HyperplaneSet out;
  out.grid_value = vgrid;
  out.value = vgrid;

  std::vector<Vec> dirs;
  for (std::size_t i = 0; i < M; ++i) {
    Vec e(M, 0.0);
    e[i] = 1.0;
    dirs.push_back(e);
  }
  if (M >= 2) {
    Rng rng(0x1a2b3c4d);
    for (int k = 0; k < 8; ++k) {
      Vec d(M);
      double n2 = 0.0;
      for (std::size_t i = 0; i < M; ++i) {
        d[i] = rng.uniform(-1.0, 1.0);
        n2 += d[i] * d[i];
      }
      if (n2 < 1e-4) {
        d.assign(M, 0.0);
        d[k % M] = 1.0;
        n2 = 1.0;
      }
      double inv = 1.0 / std::sqrt(n2);
      for (double& c : d) c *= inv;
      dirs.push_back(d);
    }
  }

  for (const Vec& d : dirs) {
    LambdaInterval iv;
    iv.direction = d;
    iv.hi = grid_support(net, grid.coords, x0, vgrid, d);
    Vec neg(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) neg[i] = -d[i];
    double lo_sup = grid_support(net, grid.coords, x0, vgrid, neg);
    iv.lo = lo_sup == kInf ? -kInf : -lo_sup;
    iv.exact = false;
    out.intervals.push_back(std::move(iv));
  }

  // closed-form refinement in one dimension
  bool refined = false;
  if (M == 1 && model.has_exact_1d()) {
    double vref = vgrid, lo = out.intervals[0].lo, hi = out.intervals[0].hi;
    if (model.is_pwq()) {
      Cav1dResult cav = concavify_1d_exact(model, menu);
      vref = cav.value;
      PiecewiseNet pw = build_piecewise_net(model, menu, {x0[0]});
      double sup_right, inf_left;
      difference_quotient_range(pw, x0[0], vref, &sup_right, &inf_left);
      lo = sup_right;
      hi = inf_left;
      refined = true;
    } else {
      refine_smooth_conjugate(model, menu, &vref, &lo, &hi);
      refined = true;
    }
    if (refined) {
      if (hi < lo) {
        double mid = 0.5 * (lo + hi);
        lo = hi = mid;  // singleton up to roundoff
      }
      out.value = vref;
      out.intervals[0].lo = lo;
      out.intervals[0].hi = hi;
      out.intervals[0].exact = true;
      out.exact = true;
    }
  }

  // witness slope
  if (M == 1) {
    // zero clamped into the certified interval keeps the norm minimal
    double lo = out.intervals[0].lo, hi = out.intervals[0].hi;
    double w;
    if (lo == -kInf && hi == kInf) {
      w = 0.0;
    } else if (lo == -kInf) {
      w = std::min(hi, 0.0);
    } else if (hi == kInf) {
      w = std::max(lo, 0.0);
    } else {
      w = std::clamp(0.0, lo, hi);
    }
    out.witness = {w};
  } else {
    out.witness = dual_slope;
    double tol = 1e-7 * (1.0 + std::abs(vgrid));
    if (!lambda_supports(net, grid.coords, x0, out.value, out.witness, tol)) {
      Vec flipped(M);
      for (std::size_t i = 0; i < M; ++i) flipped[i] = -dual_slope[i];
      if (lambda_supports(net, grid.coords, x0, out.value, flipped, tol)) {
        out.witness = flipped;
      } else {
        throw Error(ErrorCode::SolverError, "no admissible slope witness found");
      }
    }
  }

  out.max_width = 0.0;
  for (const LambdaInterval& iv : out.intervals) {
    double w = iv.hi - iv.lo;
    if (iv.lo == -kInf || iv.hi == kInf) w = kInf;
    out.max_width = std::max(out.max_width, std::max(0.0, w));
  }

  out.level = out.value;
  for (std::size_t i = 0; i < M; ++i) out.level -= out.witness[i] * x0[i];
  return out;
}

HyperplaneSet lambda_set(const CostModel& model, const Menu& menu, std::size_t resolution) {
  Grid grid = make_grid(model, resolution);
  return lambda_set(model, menu, grid);
}

}  // namespace ricav
