#include "ricav/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "ricav/envelope.hpp"
#include "ricav/errors.hpp"
#include "ricav/rng.hpp"
#include "ricav/simplex.hpp"

namespace ricav {

namespace {

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

Vec sub(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec add(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

// Orthogonality row applied to delta at a certificate point.
Vec orth_row(OrthConvention conv, const Vec& coord, const Vec& prior_coord) {
  return conv == OrthConvention::Shifted ? sub(coord, prior_coord) : coord;
}

UtilityAct zero_act(std::size_t states) {
  return make_act(Vec(states, 0.0), "0");
}

// Convex weights writing the prior over the given chart points.
Vec prior_hull_weights(const std::vector<Vec>& coords, const Vec& x0) {
  std::size_t m = x0.size() + 1;
  LpProblem lp;
  lp.m = m;
  lp.n = coords.size();
  lp.b = x0;
  lp.b.push_back(1.0);
  lp.c.assign(lp.n, 0.0);
  lp.maximize = true;
  for (const Vec& y : coords) {
    Vec col = y;
    col.push_back(1.0);
    lp.cols.push_back(std::move(col));
  }
  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal) {
    throw Error(ErrorCode::PriorNotInHull, "prior is not a convex combination of the points");
  }
  return sol.x;
}

double hull_residual_of(const std::vector<Vec>& coords, const Vec& w, const Vec& x0) {
  Vec mean(x0.size(), 0.0);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    for (std::size_t m = 0; m < x0.size(); ++m) mean[m] += w[i] * coords[i][m];
  }
  double r = 0.0;
  for (std::size_t m = 0; m < x0.size(); ++m) r = std::max(r, std::abs(mean[m] - x0[m]));
  return r;
}

std::vector<Vec> chart_points_of(const CostModel& model, const std::vector<Belief>& points) {
  if (points.empty()) throw Error(ErrorCode::PriorNotInHull, "empty point set");
  std::vector<Vec> coords;
  coords.reserve(points.size());
  for (const Belief& p : points) {
    if (!model.in_domain(p)) throw Error(ErrorCode::OutsideDomain, "point outside the cost domain");
    coords.push_back(model.chart().apply(p));
  }
  return coords;
}

// Sample chart points of the domain for subgradient-inequality spot checks.
std::vector<Vec> domain_samples(const CostModel& model, std::size_t count) {
  const Chart& chart = model.chart();
  std::vector<Vec> out;
  out.reserve(count);
  Rng rng(0x51d3ca57u);
  if (chart.dim == 1) {
    double lo = 0.0, hi = 1.0;
    chart_interval(model, &lo, &hi);
    for (std::size_t i = 0; i < count; ++i) out.push_back({rng.uniform(lo, hi)});
    return out;
  }
  double mc = model.grid_min_coordinate();
  std::size_t guard = 0;
  while (out.size() < count && guard < 200 * count) {
    ++guard;
    Vec p(chart.states);
    double tot = 0.0;
    for (double& v : p) {
      v = -std::log(std::max(rng.u01(), 1e-300));
      tot += v;
    }
    bool ok = true;
    for (double& v : p) {
      v /= tot;
      if (v < mc) ok = false;
    }
    if (!ok) continue;
    Belief b = make_belief(p);
    if (!model.in_domain(b)) continue;
    out.push_back(chart.apply(b));
  }
  return out;
}

// Worst violation of lam . (y - point) <= psibar(y) - psibar(point) over samples.
double subgrad_violation(const CostModel& model, const Vec& point, const Vec& lam,
                         const std::vector<Vec>& samples) {
  double base = model.psi_bar(point);
  double worst = 0.0;
  for (const Vec& y : samples) {
    double rhs = model.psi_bar(y) - base;
    if (!std::isfinite(rhs)) continue;
    worst = std::max(worst, dot(lam, sub(y, point)) - rhs);
  }
  return worst;
}

// Shared feasibility program for joint non-differentiability directions:
// delta = b_i - a_i with a_i, b_i in subdiff_i for every i, delta orthogonal
// to the convention rows, objective linear in delta.
struct DirectionLp {
  LpProblem lp;
  std::size_t delta_plus = 0;  // first delta+ column
  std::size_t delta_minus = 0;
  std::vector<std::size_t> a_start;  // first a column per point
  std::size_t dim = 0;
};

DirectionLp build_direction_lp(const std::vector<Polytope>& subdiffs,
                               const std::vector<Vec>& coords, const Vec& x0,
                               OrthConvention conv) {
  std::size_t K = subdiffs.size();
  std::size_t M = x0.size();
  DirectionLp out;
  out.dim = M;
  LpProblem& lp = out.lp;
  lp.m = K * M + 3 * K;
  lp.maximize = true;
  lp.b.assign(lp.m, 0.0);
  for (std::size_t i = 0; i < K; ++i) {
    lp.b[K * M + i] = 1.0;      // sum of a weights
    lp.b[K * M + K + i] = 1.0;  // sum of b weights
  }
  auto blank = [&] { return Vec(lp.m, 0.0); };
  for (std::size_t i = 0; i < K; ++i) {
    out.a_start.push_back(lp.cols.size());
    for (const Vec& v : subdiffs[i].vertices) {
      Vec col = blank();
      for (std::size_t m = 0; m < M; ++m) col[i * M + m] = -v[m];
      col[K * M + i] = 1.0;
      lp.cols.push_back(std::move(col));
    }
  }
  for (std::size_t i = 0; i < K; ++i) {
    for (const Vec& v : subdiffs[i].vertices) {
      Vec col = blank();
      for (std::size_t m = 0; m < M; ++m) col[i * M + m] = v[m];
      col[K * M + K + i] = 1.0;
      lp.cols.push_back(std::move(col));
    }
  }
  out.delta_plus = lp.cols.size();
  for (std::size_t m = 0; m < M; ++m) {
    Vec col = blank();
    for (std::size_t i = 0; i < K; ++i) {
      col[i * M + m] = -1.0;
      col[K * M + 2 * K + i] = orth_row(conv, coords[i], x0)[m];
    }
    lp.cols.push_back(std::move(col));
  }
  out.delta_minus = lp.cols.size();
  for (std::size_t m = 0; m < M; ++m) {
    Vec col = blank();
    for (std::size_t i = 0; i < K; ++i) {
      col[i * M + m] = 1.0;
      col[K * M + 2 * K + i] = -orth_row(conv, coords[i], x0)[m];
    }
    lp.cols.push_back(std::move(col));
  }
  lp.n = lp.cols.size();
  lp.c.assign(lp.n, 0.0);
  return out;
}

Vec probe_solve(DirectionLp& dlp, const Vec& d) {
  LpProblem& lp = dlp.lp;
  for (std::size_t m = 0; m < dlp.dim; ++m) {
    lp.c[dlp.delta_plus + m] = d[m];
    lp.c[dlp.delta_minus + m] = -d[m];
  }
  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal) {
    throw Error(ErrorCode::SolverError, "direction search program did not solve");
  }
  return sol.x;
}

std::vector<Vec> probe_directions(std::size_t M, uint64_t seed) {
  std::vector<Vec> dirs;
  for (std::size_t m = 0; m < M; ++m) {
    Vec plus(M, 0.0), minus(M, 0.0);
    plus[m] = 1.0;
    minus[m] = -1.0;
    dirs.push_back(plus);
    dirs.push_back(minus);
  }
  Rng rng(seed);
  for (int k = 0; k < 8; ++k) {
    Vec d(M);
    double n = 0.0;
    for (double& v : d) {
      v = rng.uniform(-1.0, 1.0);
      n += v * v;
    }
    n = std::sqrt(n);
    if (n < 1e-9) {
      d.assign(M, 0.0);
      d[0] = 1.0;
      n = 1.0;
    }
    for (double& v : d) v /= n;
    dirs.push_back(d);
  }
  return dirs;
}

// Menu value through the sharpest available oracle: closed-form envelope for
// one-dimensional piecewise-quadratic costs, conjugate-refined slope program
// for other one-dimensional families, grid program otherwise.
double menu_value(const CostModel& model, const Menu& menu, const Grid& grid) {
  if (model.chart().dim == 1 && model.is_pwq()) return concavify_1d_exact(model, menu).value;
  if (model.chart().dim == 1 && model.has_exact_1d()) return lambda_set(model, menu, grid).value;
  return solve_menu(model, menu, grid).value;
}

Vec min_norm_vertex(const Polytope& poly) {
  if (poly.vertices.empty()) throw Error(ErrorCode::SolverError, "empty subdifferential");
  std::size_t best = 0;
  for (std::size_t i = 1; i < poly.vertices.size(); ++i) {
    if (norm2(poly.vertices[i]) < norm2(poly.vertices[best]) - 1e-15) best = i;
  }
  return poly.vertices[best];
}

}  // namespace

std::optional<NdisdCertificate> ndisd_probe(const CostModel& model,
                                            const std::vector<Belief>& points,
                                            OrthConvention conv, uint64_t seed) {
  std::vector<Vec> coords = chart_points_of(model, points);
  const Vec& x0 = model.prior_coord();
  Vec weights = prior_hull_weights(coords, x0);

  std::vector<Polytope> subdiffs;
  bool all_singleton = true;
  for (const Vec& y : coords) {
    subdiffs.push_back(model.subdiff(y));
    all_singleton = all_singleton && subdiffs.back().singleton();
  }
  if (all_singleton) return std::nullopt;

  DirectionLp dlp = build_direction_lp(subdiffs, coords, x0, conv);
  std::size_t M = x0.size();
  Vec best_x;
  double best_norm = 0.0;
  for (const Vec& d : probe_directions(M, seed)) {
    Vec x = probe_solve(dlp, d);
    Vec delta(M);
    for (std::size_t m = 0; m < M; ++m) {
      delta[m] = x[dlp.delta_plus + m] - x[dlp.delta_minus + m];
    }
    double along = dot(delta, d);
    if (along <= 1e-8) continue;
    if (norm2(delta) > best_norm + 1e-12) {
      best_norm = norm2(delta);
      best_x = x;
    }
  }
  if (best_x.empty()) return std::nullopt;

  NdisdCertificate cert;
  cert.points = points;
  cert.coords = coords;
  cert.hull_weights = weights;
  cert.hull_residual = hull_residual_of(coords, weights, x0);
  cert.delta.assign(M, 0.0);
  for (std::size_t m = 0; m < M; ++m) {
    cert.delta[m] = best_x[dlp.delta_plus + m] - best_x[dlp.delta_minus + m];
  }
  for (std::size_t i = 0; i < coords.size(); ++i) {
    Vec lam(M, 0.0);
    const std::vector<Vec>& verts = subdiffs[i].vertices;
    for (std::size_t v = 0; v < verts.size(); ++v) {
      double w = best_x[dlp.a_start[i] + v];
      for (std::size_t m = 0; m < M; ++m) lam[m] += w * verts[v][m];
    }
    cert.lambdas.push_back(lam);
    cert.orth_residual =
        std::max(cert.orth_residual, std::abs(dot(cert.delta, orth_row(conv, coords[i], x0))));
  }
  std::vector<Vec> samples = domain_samples(model, 100);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    cert.subgrad_residual = std::max(
        cert.subgrad_residual, subgrad_violation(model, coords[i], cert.lambdas[i], samples));
    cert.subgrad_residual =
        std::max(cert.subgrad_residual,
                 subgrad_violation(model, coords[i], add(cert.lambdas[i], cert.delta), samples));
  }
  return cert;
}

Polytope d_set(const CostModel& model, const std::vector<Belief>& points, OrthConvention conv) {
  std::vector<Vec> coords = chart_points_of(model, points);
  const Vec& x0 = model.prior_coord();
  prior_hull_weights(coords, x0);

  std::size_t M = x0.size();
  std::vector<Polytope> subdiffs;
  bool all_singleton = true;
  for (const Vec& y : coords) {
    subdiffs.push_back(model.subdiff(y));
    all_singleton = all_singleton && subdiffs.back().singleton();
  }
  Polytope out;
  if (all_singleton) {
    out.vertices.push_back(Vec(M, 0.0));
    return out;
  }
  if (M == 1) {
    double half = kInf;
    bool cut = false;
    for (std::size_t i = 0; i < coords.size(); ++i) {
      double lo = kInf, hi = -kInf;
      for (const Vec& v : subdiffs[i].vertices) {
        lo = std::min(lo, v[0]);
        hi = std::max(hi, v[0]);
      }
      half = std::min(half, hi - lo);
      if (std::abs(orth_row(conv, coords[i], x0)[0]) > 1e-12) cut = true;
    }
    if (cut || half <= 1e-12) {
      out.vertices.push_back({0.0});
    } else {
      out.vertices.push_back({-half});
      out.vertices.push_back({half});
    }
    return out;
  }
  // Higher dimensions: hull of the probe optima. Inner shape, always holds 0.
  DirectionLp dlp = build_direction_lp(subdiffs, coords, x0, conv);
  out.vertices.push_back(Vec(M, 0.0));
  for (const Vec& d : probe_directions(M, kProbeSeed)) {
    Vec x = probe_solve(dlp, d);
    Vec delta(M);
    for (std::size_t m = 0; m < M; ++m) delta[m] = x[dlp.delta_plus + m] - x[dlp.delta_minus + m];
    if (norm2(delta) < 1e-10) continue;
    bool dup = false;
    for (const Vec& v : out.vertices) {
      if (norm2(sub(v, delta)) < 1e-10) dup = true;
    }
    if (!dup) out.vertices.push_back(delta);
  }
  return out;
}

JddReport jdd_check(const CostModel& model, const std::vector<std::vector<Belief>>& candidate_sets,
                    OrthConvention conv, uint64_t seed) {
  const Chart& chart = model.chart();
  const Vec& x0 = model.prior_coord();
  JddReport report;

  std::vector<std::vector<Belief>> candidates;
  candidates.push_back({model.prior()});
  for (const Vec& k : model.kink_coords()) {
    double gap = 0.0;
    for (std::size_t m = 0; m < x0.size(); ++m) gap = std::max(gap, std::abs(k[m] - x0[m]));
    if (gap <= 1e-12) continue;  // the prior singleton already covers it
    Vec r(x0.size());
    for (std::size_t m = 0; m < x0.size(); ++m) r[m] = 2.0 * x0[m] - k[m];
    try {
      Belief pk = chart.invert(k);
      Belief pr = chart.invert(r);
      if (!model.in_domain(pk) || !model.in_domain(pr)) continue;
      candidates.push_back({pk, pr});
    } catch (const Error&) {
      continue;  // reflection leaves the simplex
    }
  }
  for (const std::vector<Belief>& s : candidate_sets) candidates.push_back(s);

  for (const std::vector<Belief>& cand : candidates) {
    std::optional<NdisdCertificate> cert;
    try {
      cert = ndisd_probe(model, cand, conv, seed);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::PriorNotInHull) {
        report.skipped.push_back(cand);
        continue;
      }
      throw;
    }
    if (cert) {
      report.verdict = JddReport::Verdict::Violated;
      report.certificate = std::move(cert);
      report.conclusive = true;  // a certificate is a constructive proof
      return report;
    }
    report.cleared.push_back(cand);
  }
  report.verdict = JddReport::Verdict::Satisfied;
  report.conclusive = model.kinks_exhaustive();
  return report;
}

HMenuResult build_menu_h(const CostModel& model, const NdisdCertificate& cert,
                         std::size_t resolution) {
  std::size_t K = cert.coords.size();
  if (K == 0 || cert.lambdas.size() != K || cert.points.size() != K) {
    throw Error(ErrorCode::CertificateInvalid, "certificate sizes disagree");
  }
  const Chart& chart = model.chart();
  const Vec& x0 = model.prior_coord();
  std::size_t M = x0.size();
  bool delta_zero = cert.delta.empty() || norm2(cert.delta) <= 1e-12;

  Vec weights = cert.hull_weights;
  if (weights.size() != K || hull_residual_of(cert.coords, weights, x0) > 1e-8) {
    try {
      weights = prior_hull_weights(cert.coords, x0);
    } catch (const Error&) {
      throw Error(ErrorCode::CertificateInvalid, "prior is outside the hull of the points");
    }
  }
  for (std::size_t i = 0; i < K; ++i) {
    Polytope sd = model.subdiff(cert.coords[i]);
    if (!polytope_contains(sd, cert.lambdas[i])) {
      throw Error(ErrorCode::CertificateInvalid, "slope is not a subgradient at its point");
    }
    if (!delta_zero && !polytope_contains(sd, add(cert.lambdas[i], cert.delta))) {
      throw Error(ErrorCode::CertificateInvalid, "shifted slope is not a subgradient at its point");
    }
  }

  std::vector<UtilityAct> acts;
  for (std::size_t i = 0; i < K; ++i) {
    acts.push_back(act_from_affine(chart, cert.lambdas[i], cert.coords[i],
                                   model.psi_bar(cert.coords[i]), "h" + std::to_string(i + 1)));
  }
  HMenuResult out;
  out.menu = make_menu(std::move(acts));

  Grid grid = make_grid(model, resolution, cert.coords);
  out.value = solve_menu(model, out.menu, grid).value;
  if (std::abs(out.value) > 1e-8) {
    throw Error(ErrorCode::CertificateInvalid, "tangent menu value did not vanish");
  }
  std::vector<double> net = net_on_grid(model, out.menu, grid);
  out.zero_supported = lambda_supports(net, grid.coords, x0, 0.0, Vec(M, 0.0), 1e-8);
  if (!out.zero_supported) {
    throw Error(ErrorCode::CertificateInvalid, "zero slope fails to support the tangent menu");
  }
  for (std::size_t i = 0; i < K && !delta_zero; ++i) {
    out.orth_residual =
        std::max(out.orth_residual, std::abs(dot(cert.delta, sub(cert.coords[i], x0))));
  }
  out.neg_delta_checked = delta_zero || out.orth_residual <= 1e-10;
  if (out.neg_delta_checked) {
    if (delta_zero) {
      out.neg_delta_supported = out.zero_supported;
    } else {
      Vec neg(M);
      for (std::size_t m = 0; m < M; ++m) neg[m] = -cert.delta[m];
      out.neg_delta_supported = lambda_supports(net, grid.coords, x0, 0.0, neg, 1e-8);
      if (!out.neg_delta_supported) {
        throw Error(ErrorCode::CertificateInvalid,
                    "negated direction fails to support the tangent menu");
      }
    }
  }
  return out;
}

CounterexampleReport build_iia_counterexample(const CostModel& model,
                                              const NdisdCertificate& cert,
                                              std::size_t resolution) {
  const Chart& chart = model.chart();
  const Vec& x0 = model.prior_coord();
  std::size_t M = x0.size();
  double dn = cert.delta.empty() ? 0.0 : norm2(cert.delta);
  if (dn <= 1e-12) {
    throw Error(ErrorCode::CertificateInvalid, "direction is zero, nothing to separate");
  }
  HMenuResult hres = build_menu_h(model, cert, resolution);

  Vec unit(M);
  for (std::size_t m = 0; m < M; ++m) unit[m] = cert.delta[m] / dn;
  Vec eps;
  double t = 0.25;
  for (int step = 0; step < 40; ++step) {
    Vec trial(M);
    for (std::size_t m = 0; m < M; ++m) trial[m] = t * unit[m];
    bool ok = true;
    for (int sgn : {+1, -1}) {
      Vec y(M);
      for (std::size_t m = 0; m < M; ++m) y[m] = x0[m] + sgn * trial[m];
      try {
        Belief p = chart.invert(y);
        if (!model.in_domain(p)) ok = false;
      } catch (const Error&) {
        ok = false;
      }
    }
    if (ok) {
      eps = trial;
      break;
    }
    t *= 0.5;
  }
  if (eps.empty()) {
    throw Error(ErrorCode::EpsilonSearchFailed, "domain too thin along the direction");
  }

  Vec yp = add(x0, eps), ym = sub(x0, eps);
  Vec alpha = min_norm_vertex(model.subdiff(yp));
  Vec beta = sub(min_norm_vertex(model.subdiff(ym)), cert.delta);
  double de = dot(cert.delta, eps);
  UtilityAct f_alpha = act_from_affine(chart, alpha, yp, model.psi_bar(yp), "f_alpha");
  UtilityAct f_beta = act_from_affine(chart, beta, ym, model.psi_bar(ym) + de, "f_beta");

  CounterexampleReport rep;
  rep.certificate = cert;
  rep.epsilon = eps;
  rep.h = hres.menu;
  {
    std::vector<UtilityAct> facts{f_alpha};
    for (const UtilityAct& a : hres.menu.acts) facts.push_back(a);
    rep.f = make_menu(std::move(facts));
    std::vector<UtilityAct> gacts{f_beta};
    for (const UtilityAct& a : hres.menu.acts) gacts.push_back(a);
    rep.g = make_menu(std::move(gacts));
  }
  MenuSetOps ops = set_ops(rep.f, rep.g);
  if (!ops.intersection) {
    throw Error(ErrorCode::CertificateInvalid, "construction lost the shared menu");
  }

  std::vector<Vec> knots = cert.coords;
  knots.push_back(yp);
  knots.push_back(ym);
  Grid grid = make_grid(model, resolution, knots);
  rep.value_h = menu_value(model, rep.h, grid);
  rep.value_f = menu_value(model, rep.f, grid);
  rep.value_g = menu_value(model, rep.g, grid);
  rep.value_intersection = menu_value(model, *ops.intersection, grid);
  rep.value_union = menu_value(model, ops.union_menu, grid);
  rep.predicted_lower_bound = 0.5 * de;

  AxiomReport& ax = rep.axiom;
  ax.premise_values = {{"H", rep.value_h},
                       {"F", rep.value_f},
                       {"G", rep.value_g},
                       {"F&G", rep.value_intersection}};
  ax.premise_residual = std::max({std::abs(rep.value_f - rep.value_intersection),
                                  std::abs(rep.value_g - rep.value_intersection),
                                  std::abs(rep.value_h - rep.value_intersection)});
  ax.premise_holds = ax.premise_residual <= kValueTol;
  ax.conclusion_value = rep.value_union;
  ax.margin = rep.value_union - rep.value_intersection;
  if (!ax.premise_holds) {
    ax.verdict = AxiomReport::Verdict::PremiseFails;
  } else if (ax.margin > 10.0 * kValueTol) {
    ax.verdict = AxiomReport::Verdict::Violated;
  } else {
    ax.verdict = AxiomReport::Verdict::Satisfied;
  }
  if (rep.value_union < rep.predicted_lower_bound - kValueTol) {
    ax.note = "union value fell below the predicted bound";
  }
  return rep;
}

UtilityAct ignorance_equivalent(const CostModel& model, const Menu& menu,
                                const SolveReport& solve, const HyperplaneSet& lam,
                                const Grid& grid, const std::optional<Vec>& lambda_override) {
  const Chart& chart = model.chart();
  const Vec& x0 = model.prior_coord();
  Vec base;
  if (lambda_override) {
    base = *lambda_override;
  } else {
    if (lam.max_width > kTolWidth) {
      throw Error(ErrorCode::NonUniqueHyperplane,
                  "slope set is wider than the certification tolerance");
    }
    base = lam.witness;
  }
  double value = lam.value;
  if (!(value == value)) value = solve.value;  // NaN guard; slope program owns the refinement
  Vec g = min_norm_point(model.subdiff(x0));
  UtilityAct h = act_from_affine(chart, add(base, g), x0, value, "h");

  double at_prior = h.expectation(model.prior());
  if (std::abs(at_prior - value) > kValueTol) {
    throw Error(ErrorCode::SolverError, "equivalent act missed the menu value at the prior");
  }
  MenuSetOps ops = set_ops(menu, make_menu({h}));
  double vu = menu_value(model, ops.union_menu, grid);
  if (std::abs(vu - value) > kValueTol) {
    throw Error(ErrorCode::SolverError, "adding the equivalent act moved the menu value");
  }
  return h;
}

AxiomReport check_iia(const CostModel& model, const Menu& f, const Menu& g, const Grid& grid) {
  AxiomReport rep;
  MenuSetOps ops = set_ops(f, g);
  double vf = menu_value(model, f, grid);
  double vg = menu_value(model, g, grid);
  double vu = menu_value(model, ops.union_menu, grid);
  if (!ops.intersection) {
    rep.verdict = AxiomReport::Verdict::PremiseFails;
    rep.premise_values = {{"F", vf}, {"G", vg}};
    rep.conclusion_value = vu;
    rep.note = "premise menu undefined: the menus share no act";
    return rep;
  }
  double vi = menu_value(model, *ops.intersection, grid);
  rep.premise_values = {{"F", vf}, {"G", vg}, {"F&G", vi}};
  rep.premise_residual = std::max(std::abs(vf - vi), std::abs(vg - vi));
  rep.premise_holds = rep.premise_residual <= kValueTol;
  rep.conclusion_value = vu;
  rep.margin = vu - vi;
  if (!rep.premise_holds) {
    rep.verdict = AxiomReport::Verdict::PremiseFails;
  } else if (std::abs(rep.margin) > 10.0 * kValueTol) {
    rep.verdict = AxiomReport::Verdict::Violated;
  } else {
    rep.verdict = AxiomReport::Verdict::Satisfied;
  }
  return rep;
}

AxiomReport check_ie(const CostModel& model, const Menu& menu, const Grid& grid) {
  AxiomReport rep;
  HyperplaneSet lam = lambda_set(model, menu, grid);
  SolveReport solve = solve_menu(model, menu, grid);
  double value = lam.value;
  try {
    UtilityAct h = ignorance_equivalent(model, menu, solve, lam, grid);
    rep.verdict = AxiomReport::Verdict::Satisfied;
    rep.premise_values = {{"F", value}, {"h", h.expectation(model.prior())}};
    rep.premise_holds = true;
    rep.conclusion_value = value;
    rep.witness = h;
    return rep;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonUniqueHyperplane) throw;
  }

  // Wide slope set: sweep admissible slopes against subdifferential vertices.
  std::vector<Vec> lambda_choices{lam.witness};
  if (model.chart().dim == 1 && !lam.intervals.empty()) {
    if (lam.intervals[0].lo > -kInf) lambda_choices.push_back({lam.intervals[0].lo});
    if (lam.intervals[0].hi < kInf) lambda_choices.push_back({lam.intervals[0].hi});
  }
  Polytope sd = model.subdiff(model.prior_coord());
  std::vector<Vec> g_choices{min_norm_point(sd)};
  for (const Vec& v : sd.vertices) g_choices.push_back(v);

  double best = kInf;
  std::optional<UtilityAct> best_act;
  for (const Vec& lc : lambda_choices) {
    for (const Vec& gc : g_choices) {
      UtilityAct h = act_from_affine(model.chart(), add(lc, gc), model.prior_coord(), value, "h");
      MenuSetOps ops = set_ops(menu, make_menu({h}));
      double vu = menu_value(model, ops.union_menu, grid);
      double margin = vu - value;
      if (margin < best) {
        best = margin;
        best_act = h;
      }
      if (std::abs(margin) <= kValueTol) {
        rep.verdict = AxiomReport::Verdict::Satisfied;
        rep.premise_values = {{"F", value}, {"h", h.expectation(model.prior())}};
        rep.premise_holds = true;
        rep.conclusion_value = vu;
        rep.margin = margin;
        rep.witness = h;
        return rep;
      }
    }
  }
  rep.premise_values = {{"F", value}};
  rep.premise_holds = true;
  rep.conclusion_value = value + best;
  rep.margin = best;
  rep.witness = best_act;
  rep.verdict = best > 10.0 * kValueTol ? AxiomReport::Verdict::Violated
                                        : AxiomReport::Verdict::Satisfied;
  return rep;
}

namespace {

// Value of a menu under a max-of-components cost, by one linear program:
// maximize t subject to t <= sum_j w_j (phi_j - psi_k(y_j)) for every k,
// with w a grid distribution whose mean is the prior.
double finite_value(const FinitePsiModel& fm, const Menu& menu, const std::vector<Belief>& pts,
                    const std::vector<Vec>& coords) {
  std::size_t n = pts.size();
  std::size_t K = fm.components.size();
  std::size_t M = fm.chart.dim;
  std::vector<double> phi(n);
  for (std::size_t j = 0; j < n; ++j) phi[j] = menu_phi(menu, pts[j]).value;
  std::vector<std::vector<double>> psik(K, std::vector<double>(n));
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t j = 0; j < n; ++j) psik[k][j] = fm.components[k].value(coords[j]);
  }
  LpProblem lp;
  lp.m = K + M + 1;
  lp.maximize = true;
  lp.b.assign(lp.m, 0.0);
  for (std::size_t m = 0; m < M; ++m) lp.b[K + m] = fm.prior_coord[m];
  lp.b[K + M] = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    Vec col(lp.m, 0.0);
    for (std::size_t k = 0; k < K; ++k) col[k] = -(phi[j] - psik[k][j]);
    for (std::size_t m = 0; m < M; ++m) col[K + m] = coords[j][m];
    col[K + M] = 1.0;
    lp.cols.push_back(std::move(col));
  }
  {
    Vec tp(lp.m, 0.0), tm(lp.m, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
      tp[k] = 1.0;
      tm[k] = -1.0;
    }
    lp.cols.push_back(std::move(tp));
    lp.cols.push_back(std::move(tm));
  }
  for (std::size_t k = 0; k < K; ++k) {
    Vec s(lp.m, 0.0);
    s[k] = 1.0;
    lp.cols.push_back(std::move(s));
  }
  lp.n = lp.cols.size();
  lp.c.assign(lp.n, 0.0);
  lp.c[pts.size()] = 1.0;
  lp.c[pts.size() + 1] = -1.0;
  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal) {
    throw Error(ErrorCode::SolverError, "finite-cost value program did not solve");
  }
  return sol.value + fm.normalizer;
}

}  // namespace

AxiomReport check_ie(const FinitePsiModel& fm, const Menu& menu, std::size_t resolution) {
  if (fm.chart.dim != 1) {
    throw Error(ErrorCode::UnsupportedCostFamily, "finite-cost axiom check needs two states");
  }
  if (resolution < 2) throw Error(ErrorCode::ResolutionTooSmall, "need at least two grid points");
  std::vector<Vec> coords;
  for (std::size_t j = 0; j < resolution; ++j) {
    coords.push_back({static_cast<double>(j) / static_cast<double>(resolution - 1)});
  }
  coords.push_back(fm.prior_coord);
  std::sort(coords.begin(), coords.end(),
            [](const Vec& a, const Vec& b) { return a[0] < b[0]; });
  coords.erase(std::unique(coords.begin(), coords.end(),
                           [](const Vec& a, const Vec& b) {
                             return std::abs(a[0] - b[0]) <= kTolDedup;
                           }),
               coords.end());
  std::vector<Belief> pts;
  for (const Vec& y : coords) pts.push_back(fm.chart.invert(y));

  AxiomReport rep;
  double vf = finite_value(fm, menu, pts, coords);

  std::vector<Vec> slopes{Vec(fm.chart.dim, 0.0)};
  for (const PsiComponent& c : fm.components) {
    bool dup = false;
    for (const Vec& s : slopes) {
      if (norm2(sub(s, c.grad_prior)) <= 1e-12) dup = true;
    }
    if (!dup) slopes.push_back(c.grad_prior);
  }

  double best = kInf;
  std::optional<UtilityAct> best_act;
  double best_premise = 0.0;
  for (const Vec& s : slopes) {
    UtilityAct h = act_from_affine(fm.chart, s, fm.prior_coord, vf, "h");
    double vh = finite_value(fm, make_menu({h}), pts, coords);
    if (std::abs(vh - vf) > kValueTol) continue;  // candidate is not value-matched
    MenuSetOps ops = set_ops(menu, make_menu({h}));
    double vu = finite_value(fm, ops.union_menu, pts, coords);
    double margin = vu - vf;
    if (margin < best) {
      best = margin;
      best_act = h;
      best_premise = vh;
    }
    if (std::abs(margin) <= kValueTol) {
      rep.verdict = AxiomReport::Verdict::Satisfied;
      rep.premise_values = {{"F", vf}, {"h", vh}};
      rep.premise_holds = true;
      rep.conclusion_value = vu;
      rep.margin = margin;
      rep.witness = h;
      return rep;
    }
  }
  rep.premise_values = {{"F", vf}, {"h", best_premise}};
  rep.premise_holds = best < kInf;
  rep.conclusion_value = vf + (best < kInf ? best : 0.0);
  rep.margin = best < kInf ? best : 0.0;
  rep.witness = best_act;
  rep.verdict = (best < kInf && best > 10.0 * kValueTol) ? AxiomReport::Verdict::Violated
                                                         : AxiomReport::Verdict::Satisfied;
  if (!(best < kInf)) rep.note = "no tangent candidate matched the menu value";
  return rep;
}

RecoveredPsi recover_psi(const CostModel& model, const Grid& grid) {
  const Chart& chart = model.chart();
  RecoveredPsi out;
  out.points = grid.points;
  std::vector<UtilityAct> acts{zero_act(chart.states)};
  for (std::size_t j = 0; j < grid.coords.size(); ++j) {
    Polytope sd = model.subdiff(grid.coords[j]);
    double base = model.psi_bar(grid.coords[j]);
    for (std::size_t v = 0; v < sd.vertices.size(); ++v) {
      acts.push_back(act_from_affine(chart, sd.vertices[v], grid.coords[j], base,
                                     "t" + std::to_string(j) + "_" + std::to_string(v)));
    }
  }
  out.tangents = make_menu(std::move(acts));
  out.all_irrelevant = true;
  for (const UtilityAct& a : out.tangents.acts) {
    if (!is_irrelevant(model, a, grid)) out.all_irrelevant = false;
  }
  for (std::size_t j = 0; j < grid.points.size(); ++j) {
    double rec = 0.0;
    for (const UtilityAct& a : out.tangents.acts) {
      rec = std::max(rec, a.expectation(grid.points[j]));
    }
    double act = model.psi(grid.points[j]);
    out.recovered.push_back(rec);
    out.actual.push_back(act);
    out.max_error = std::max(out.max_error, std::abs(rec - act));
  }
  return out;
}

bool is_irrelevant(const CostModel& model, const UtilityAct& h, const Grid& grid) {
  Menu m = make_menu({zero_act(model.chart().states), h});
  return solve_menu(model, m, grid).value <= kValueTol;
}

}  // namespace ricav
