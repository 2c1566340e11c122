#include "ricav/costs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ricav/errors.hpp"
#include "ricav/rng.hpp"
#include "ricav/simplex.hpp"

namespace ricav {

ConjEval CostModel::conjugate(double) const {
  throw Error(ErrorCode::UnsupportedCostFamily, family() + " has no exact conjugate oracle");
}

std::vector<PwqCell> CostModel::cells() const {
  throw Error(ErrorCode::UnsupportedCostFamily, family() + " is not piecewise quadratic");
}

bool Polytope::singleton(double tol) const {
  if (vertices.size() <= 1) return true;
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    for (std::size_t k = 0; k < vertices[i].size(); ++k) {
      if (std::abs(vertices[i][k] - vertices[0][k]) > tol) return false;
    }
  }
  return true;
}

namespace {

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& a) { return dot(a, a); }

}  // namespace

Vec min_norm_point(const Polytope& poly) {
  if (poly.vertices.empty()) throw Error(ErrorCode::EmptyDomain, "empty polytope");
  if (poly.vertices.size() == 1) return poly.vertices[0];
  if (poly.vertices.size() == 2) {
    const Vec& u = poly.vertices[0];
    const Vec& v = poly.vertices[1];
    Vec dvec(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) dvec[i] = v[i] - u[i];
    double den = norm2(dvec);
    double t = den < 1e-16 ? 0.0 : std::clamp(-dot(u, dvec) / den, 0.0, 1.0);
    Vec out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] + t * dvec[i];
    return out;
  }
  // Frank-Wolfe with away steps; vertex counts here are tiny
  const std::size_t n = poly.vertices.size();
  Vec w(n, 1.0 / static_cast<double>(n));
  Vec x(poly.vertices[0].size(), 0.0);
  auto rebuild = [&] {
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += w[j] * poly.vertices[j][i];
    }
  };
  rebuild();
  for (int iter = 0; iter < 5000; ++iter) {
    std::size_t fw = 0, away = 0;
    double fwv = 1e300, awayv = -1e300;
    for (std::size_t j = 0; j < n; ++j) {
      double g = dot(x, poly.vertices[j]);
      if (g < fwv) {
        fwv = g;
        fw = j;
      }
      if (w[j] > 1e-14 && g > awayv) {
        awayv = g;
        away = j;
      }
    }
    double gap = dot(x, x) - fwv;
    if (gap < 1e-15) break;
    bool use_away = (awayv - dot(x, x)) > gap && w[away] > 1e-14;
    Vec dir(x.size());
    double tmax;
    if (use_away) {
      for (std::size_t i = 0; i < x.size(); ++i) dir[i] = x[i] - poly.vertices[away][i];
      tmax = w[away] / (1.0 - w[away]);
    } else {
      for (std::size_t i = 0; i < x.size(); ++i) dir[i] = poly.vertices[fw][i] - x[i];
      tmax = 1.0;
    }
    double den = norm2(dir);
    if (den < 1e-18) break;
    double t = std::clamp(-dot(x, dir) / den, 0.0, tmax);
    if (t <= 0.0) break;
    if (use_away) {
      for (std::size_t j = 0; j < n; ++j) w[j] *= (1.0 + t);
      w[away] -= t;
    } else {
      for (std::size_t j = 0; j < n; ++j) w[j] *= (1.0 - t);
      w[fw] += t;
    }
    rebuild();
  }
  return x;
}

bool polytope_contains(const Polytope& poly, const Vec& x, double tol) {
  if (poly.vertices.empty()) return false;
  const std::size_t d = x.size();
  LpProblem lp;
  lp.m = d + 1;
  lp.n = poly.vertices.size();
  lp.b = x;
  lp.b.push_back(1.0);
  lp.c.assign(lp.n, 0.0);
  lp.maximize = false;
  for (const Vec& v : poly.vertices) {
    Vec col = v;
    col.push_back(1.0);
    lp.cols.push_back(std::move(col));
  }
  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal) return false;
  // feasibility residual
  Vec recon(d, 0.0);
  double mass = 0.0;
  for (std::size_t j = 0; j < lp.n; ++j) {
    mass += sol.x[j];
    for (std::size_t i = 0; i < d; ++i) recon[i] += sol.x[j] * poly.vertices[j][i];
  }
  if (std::abs(mass - 1.0) > tol) return false;
  for (std::size_t i = 0; i < d; ++i) {
    if (std::abs(recon[i] - x[i]) > tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// piecewise-quadratic two-state family

namespace {

class PwqCost final : public CostModel {
 public:
  PwqCost(Belief prior, std::vector<PwqCell> cells, std::vector<double> declared_kinks,
          std::string family)
      : family_(std::move(family)), prior_(std::move(prior)) {
    if (prior_.size() != 2) {
      throw Error(ErrorCode::NotTwoStates, "piecewise-quadratic costs are two-state");
    }
    chart_ = full_simplex_chart(2);
    prior_coord_ = chart_.apply(prior_);
    const double q = prior_coord_[0];
    if (q < kFacetSlack || q > 1.0 - kFacetSlack) {
      throw Error(ErrorCode::PriorOnDomainBoundary, "prior sits on the simplex boundary");
    }
    if (cells.empty()) throw Error(ErrorCode::EmptyDomain, "no cells");
    std::sort(cells.begin(), cells.end(),
              [](const PwqCell& x, const PwqCell& y) { return x.lo < y.lo; });
    if (std::abs(cells.front().lo) > 1e-9 || std::abs(cells.back().hi - 1.0) > 1e-9) {
      throw Error(ErrorCode::NonConvexSpec, "cells must cover [0, 1]");
    }
    cells.front().lo = 0.0;
    cells.back().hi = 1.0;
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
      if (std::abs(cells[i].hi - cells[i + 1].lo) > 1e-9) {
        throw Error(ErrorCode::NonConvexSpec, "cells leave a gap");
      }
      cells[i + 1].lo = cells[i].hi;
    }
    for (const PwqCell& c : cells) {
      if (c.hi - c.lo < 1e-9) throw Error(ErrorCode::NonConvexSpec, "degenerate cell");
      if (c.a < -1e-12) throw Error(ErrorCode::NonConvexSpec, "concave cell");
    }
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
      double t = cells[i].hi;
      if (std::abs(cells[i].eval(t) - cells[i + 1].eval(t)) > 1e-9) {
        throw Error(ErrorCode::NonConvexSpec, "discontinuity between cells");
      }
      double jump = cells[i + 1].slope(t) - cells[i].slope(t);
      if (jump < -1e-9) throw Error(ErrorCode::NonConvexSpec, "slope decreases across a cell edge");
      if (jump > 1e-9) {
        bool declared = false;
        for (double k : declared_kinks) declared = declared || std::abs(k - t) <= 1e-9;
        if (!declared) {
          std::ostringstream os;
          os << "kink at " << t << " not declared";
          throw Error(ErrorCode::NonConvexSpec, os.str());
        }
      }
    }
    // keep only declared kinks with an actual slope jump
    for (double k : declared_kinks) {
      double l, r;
      one_sided(cells, k, &l, &r);
      if (r - l > 1e-9) kinks_.push_back(k);
    }
    std::sort(kinks_.begin(), kinks_.end());

    // midpoint convexity probe, seeded
    Rng rng(0x5eedc0de);
    for (int i = 0; i < 10000; ++i) {
      double y1 = rng.u01();
      double y2 = rng.u01();
      double mid = 0.5 * (y1 + y2);
      double lhs = eval_cells(cells, mid);
      double rhs = 0.5 * (eval_cells(cells, y1) + eval_cells(cells, y2));
      if (lhs > rhs + 1e-9) throw Error(ErrorCode::NonConvexSpec, "midpoint convexity probe failed");
    }

    // ground at the prior: subtract value and a minimal-norm tangent
    double v0 = eval_cells(cells, q);
    double l, r;
    one_sided(cells, q, &l, &r);
    double g0 = std::clamp(0.0, l, r);
    for (PwqCell& c : cells) {
      c.b -= g0;
      c.c -= v0 - g0 * q;
    }
    for (const PwqCell& c : cells) {
      double lo_val = std::min(c.eval(c.lo), c.eval(c.hi));
      if (c.a > 1e-14) {
        double ys = -c.b / (2.0 * c.a);
        if (ys > c.lo && ys < c.hi) lo_val = std::min(lo_val, c.eval(ys));
      }
      if (lo_val < -1e-9) throw Error(ErrorCode::NonConvexSpec, "cost dips below zero");
    }
    cells_ = std::move(cells);
  }

  std::string family() const override { return family_; }

  double psi(const Belief& p) const override {
    if (p.size() != 2) throw Error(ErrorCode::NotTwoStates, "two-state model");
    return eval_cells(cells_, p[1]);
  }

  Polytope subdiff(const Vec& ybar) const override {
    double y = ybar.at(0);
    if (y < -1e-9 || y > 1.0 + 1e-9) {
      throw Error(ErrorCode::OutsideDomain, "chart point outside [0, 1]");
    }
    y = std::clamp(y, 0.0, 1.0);
    double l, r;
    one_sided(cells_, y, &l, &r);
    if (y <= 1e-15) return Polytope{{Vec{r}}};
    if (y >= 1.0 - 1e-15) return Polytope{{Vec{l}}};
    if (r - l <= 1e-12) return Polytope{{Vec{0.5 * (l + r)}}};
    return Polytope{{Vec{l}, Vec{r}}};
  }

  const Chart& chart() const override { return chart_; }
  const Belief& prior() const override { return prior_; }
  const Vec& prior_coord() const override { return prior_coord_; }

  std::vector<Vec> kink_coords() const override {
    std::vector<Vec> out;
    for (double k : kinks_) out.push_back(Vec{k});
    return out;
  }

  bool has_exact_1d() const override { return true; }
  bool is_pwq() const override { return true; }
  std::vector<PwqCell> cells() const override { return cells_; }

  ConjEval conjugate(double s) const override {
    ConjEval best{-kInf, 0.0, 0.0};
    auto offer = [&best](double val, double ylo, double yhi) {
      double tol = 1e-11 * (1.0 + std::abs(val) + std::abs(best.value));
      if (val > best.value + tol) {
        best = ConjEval{val, ylo, yhi};
      } else if (val > best.value - tol) {
        best.value = std::max(best.value, val);
        best.ymin = std::min(best.ymin, ylo);
        best.ymax = std::max(best.ymax, yhi);
      }
    };
    for (const PwqCell& c : cells_) {
      if (c.a > 1e-14) {
        double ys = std::clamp((s - c.b) / (2.0 * c.a), c.lo, c.hi);
        offer(s * ys - c.eval(ys), ys, ys);
      } else {
        double rel = s - c.b;
        if (rel > 1e-13) {
          offer(s * c.hi - c.eval(c.hi), c.hi, c.hi);
        } else if (rel < -1e-13) {
          offer(s * c.lo - c.eval(c.lo), c.lo, c.lo);
        } else {
          offer(s * c.lo - c.eval(c.lo), c.lo, c.hi);
        }
      }
    }
    return best;
  }

 private:
  static double eval_cells(const std::vector<PwqCell>& cells, double y) {
    if (y < -1e-9 || y > 1.0 + 1e-9) return kInf;
    y = std::clamp(y, 0.0, 1.0);
    for (const PwqCell& c : cells) {
      if (y <= c.hi + 1e-15) return c.eval(y);
    }
    return cells.back().eval(y);
  }

  // one-sided slopes at y; equal when psi is differentiable there
  static void one_sided(const std::vector<PwqCell>& cells, double y, double* l, double* r) {
    *l = kInf;
    *r = -kInf;
    for (const PwqCell& c : cells) {
      if (y >= c.lo - 1e-12 && y <= c.hi + 1e-12) {
        double s = c.slope(std::clamp(y, c.lo, c.hi));
        *l = std::min(*l, s);
        *r = std::max(*r, s);
      }
    }
  }

  std::string family_;
  Belief prior_;
  Chart chart_;
  Vec prior_coord_;
  std::vector<PwqCell> cells_;
  std::vector<double> kinks_;
};

// ---------------------------------------------------------------------------
// relative entropy

class EntropyCost final : public CostModel {
 public:
  explicit EntropyCost(Belief prior) : prior_(std::move(prior)) {
    for (std::size_t i = 0; i < prior_.size(); ++i) {
      if (prior_[i] < kFacetSlack) {
        throw Error(ErrorCode::PriorOnDomainBoundary, "prior must be interior for entropy");
      }
    }
    chart_ = full_simplex_chart(prior_.size());
    prior_coord_ = chart_.apply(prior_);
  }

  std::string family() const override { return "entropy"; }

  double psi(const Belief& p) const override {
    if (p.size() != prior_.size()) throw Error(ErrorCode::BadWeights, "state count mismatch");
    double v = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] > 0.0) v += p[i] * std::log(p[i] / prior_[i]);
    }
    return std::max(v, 0.0);
  }

  Polytope subdiff(const Vec& ybar) const override {
    Belief p = chart_.invert(ybar);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] < kEntropyClamp * (1.0 - 1e-6)) {
        throw Error(ErrorCode::OutsideDomain,
                    "gradient undefined this close to a simplex vertex");
      }
    }
    Vec g(chart_.dim);
    double base = std::log(p[0] / prior_[0]);
    for (std::size_t i = 0; i < chart_.dim; ++i) {
      g[i] = std::log(p[i + 1] / prior_[i + 1]) - base;
    }
    return Polytope{{std::move(g)}};
  }

  const Chart& chart() const override { return chart_; }
  const Belief& prior() const override { return prior_; }
  const Vec& prior_coord() const override { return prior_coord_; }
  double grid_min_coordinate() const override { return kEntropyClamp; }

  bool has_exact_1d() const override { return prior_.size() == 2; }

  ConjEval conjugate(double s) const override {
    const double q = prior_coord_[0];
    double value, ystar;
    if (s >= 0.0) {
      // ln(q e^s + 1 - q), written to stay stable for large s
      value = s + std::log(q) + std::log1p((1.0 - q) * std::exp(-s) / q);
      ystar = q / (q + (1.0 - q) * std::exp(-s));
    } else {
      value = std::log1p(q * (std::exp(s) - 1.0));
      double es = std::exp(s);
      ystar = q * es / (q * es + 1.0 - q);
    }
    return ConjEval{value, ystar, ystar};
  }

 private:
  Belief prior_;
  Chart chart_;
  Vec prior_coord_;
};

// ---------------------------------------------------------------------------
// quadratic in three or more states (two-state quadratic is a PwqCost)

class QuadraticMultiCost final : public CostModel {
 public:
  QuadraticMultiCost(Belief prior, double weight) : prior_(std::move(prior)), w_(weight) {
    for (std::size_t i = 0; i < prior_.size(); ++i) {
      if (prior_[i] < kFacetSlack) {
        throw Error(ErrorCode::PriorOnDomainBoundary, "prior on the simplex boundary");
      }
    }
    chart_ = full_simplex_chart(prior_.size());
    prior_coord_ = chart_.apply(prior_);
  }

  std::string family() const override { return "quadratic"; }

  double psi(const Belief& p) const override {
    Vec y = chart_.apply(p);
    double v = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      double dy = y[i] - prior_coord_[i];
      v += dy * dy;
    }
    return w_ * v;
  }

  Polytope subdiff(const Vec& ybar) const override {
    Vec g(ybar.size());
    for (std::size_t i = 0; i < ybar.size(); ++i) g[i] = 2.0 * w_ * (ybar[i] - prior_coord_[i]);
    return Polytope{{std::move(g)}};
  }

  const Chart& chart() const override { return chart_; }
  const Belief& prior() const override { return prior_; }
  const Vec& prior_coord() const override { return prior_coord_; }

 private:
  Belief prior_;
  Chart chart_;
  Vec prior_coord_;
  double w_;
};

// ---------------------------------------------------------------------------
// chart transport

std::vector<Vec> invert_square(const std::vector<Vec>& R) {
  const std::size_t n = R.size();
  std::vector<Vec> a(n, Vec(2 * n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = R[i][j];
    a[i][n + i] = 1.0;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) < 1e-12) {
      throw Error(ErrorCode::BadWeights, "rechart matrix is singular");
    }
    std::swap(a[col], a[piv]);
    double inv = 1.0 / a[col][col];
    for (std::size_t j = 0; j < 2 * n; ++j) a[col][j] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a[r][col];
      for (std::size_t j = 0; j < 2 * n; ++j) a[r][j] -= f * a[col][j];
    }
  }
  std::vector<Vec> out(n, Vec(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i][j] = a[i][n + j];
  }
  return out;
}

class RechartedCost final : public CostModel {
 public:
  RechartedCost(CostPtr base, std::vector<Vec> R, Vec t)
      : base_(std::move(base)), R_(std::move(R)), t_(std::move(t)) {
    const Chart& bc = base_->chart();
    const std::size_t m = bc.dim;
    if (R_.size() != m || t_.size() != m) {
      throw Error(ErrorCode::BadWeights, "rechart map has wrong dimension");
    }
    Rinv_ = invert_square(R_);
    chart_.states = bc.states;
    chart_.dim = m;
    chart_.A.assign(m, Vec(bc.states, 0.0));
    chart_.b.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t s = 0; s < bc.states; ++s) chart_.A[i][s] += R_[i][j] * bc.A[j][s];
        chart_.b[i] += R_[i][j] * bc.b[j];
      }
      chart_.b[i] += t_[i];
    }
    chart_.C.assign(bc.states, Vec(m, 0.0));
    chart_.d = bc.d;
    for (std::size_t s = 0; s < bc.states; ++s) {
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) chart_.C[s][i] += bc.C[s][j] * Rinv_[j][i];
      }
    }
    for (std::size_t s = 0; s < bc.states; ++s) {
      for (std::size_t i = 0; i < m; ++i) chart_.d[s] -= chart_.C[s][i] * t_[i];
    }
    prior_coord_ = chart_.apply(base_->prior());
  }

  std::string family() const override { return base_->family() + "|rechart"; }
  double psi(const Belief& p) const override { return base_->psi(p); }

  Polytope subdiff(const Vec& ybar) const override {
    Vec ybase = to_base(ybar);
    Polytope sub = base_->subdiff(ybase);
    Polytope out;
    for (const Vec& v : sub.vertices) {
      Vec w(v.size(), 0.0);
      // lambda' = R^-T lambda
      for (std::size_t i = 0; i < w.size(); ++i) {
        for (std::size_t j = 0; j < w.size(); ++j) w[i] += Rinv_[j][i] * v[j];
      }
      out.vertices.push_back(std::move(w));
    }
    return out;
  }

  const Chart& chart() const override { return chart_; }
  const Belief& prior() const override { return base_->prior(); }
  const Vec& prior_coord() const override { return prior_coord_; }
  std::vector<Halfspace> domain_facets() const override { return base_->domain_facets(); }

  std::vector<Vec> kink_coords() const override {
    std::vector<Vec> out;
    for (const Vec& k : base_->kink_coords()) out.push_back(from_base(k));
    return out;
  }
  bool kinks_exhaustive() const override { return base_->kinks_exhaustive(); }
  double grid_min_coordinate() const override { return base_->grid_min_coordinate(); }

  bool has_exact_1d() const override { return base_->has_exact_1d() && chart_.dim == 1; }
  bool is_pwq() const override { return base_->is_pwq() && chart_.dim == 1; }

  std::vector<PwqCell> cells() const override {
    std::vector<PwqCell> out;
    const double r = R_[0][0], t = t_[0];
    for (const PwqCell& c : base_->cells()) {
      // psibar'(y') = psibar((y' - t)/r)
      PwqCell n;
      n.a = c.a / (r * r);
      n.b = (c.b * r - 2.0 * c.a * t) / (r * r);
      n.c = (c.a * t * t) / (r * r) - c.b * t / r + c.c;
      double e1 = r * c.lo + t, e2 = r * c.hi + t;
      n.lo = std::min(e1, e2);
      n.hi = std::max(e1, e2);
      out.push_back(n);
    }
    std::sort(out.begin(), out.end(), [](const PwqCell& x, const PwqCell& y) { return x.lo < y.lo; });
    return out;
  }

  ConjEval conjugate(double s) const override {
    const double r = R_[0][0], t = t_[0];
    ConjEval b = base_->conjugate(s * r);
    double e1 = r * b.ymin + t, e2 = r * b.ymax + t;
    return ConjEval{b.value + s * t, std::min(e1, e2), std::max(e1, e2)};
  }

 private:
  Vec to_base(const Vec& y) const {
    Vec out(y.size(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
      for (std::size_t j = 0; j < y.size(); ++j) out[i] += Rinv_[i][j] * (y[j] - t_[j]);
    }
    return out;
  }
  Vec from_base(const Vec& y) const {
    Vec out(t_);
    for (std::size_t i = 0; i < y.size(); ++i) {
      for (std::size_t j = 0; j < y.size(); ++j) out[i] += R_[i][j] * y[j];
    }
    return out;
  }

  CostPtr base_;
  std::vector<Vec> R_, Rinv_;
  Vec t_;
  Chart chart_;
  Vec prior_coord_;
};

// ---------------------------------------------------------------------------
// canonicalized raw oracles

class CanonicalCost final : public CostModel {
 public:
  CanonicalCost(std::function<double(const Belief&)> psi,
                std::function<Polytope(const Vec&)> subdiff, Chart chart, Belief prior,
                std::vector<Halfspace> facets, std::vector<Vec> kinks, bool kinks_exhaustive,
                std::string name)
      : psi_(std::move(psi)),
        subdiff_(std::move(subdiff)),
        chart_(std::move(chart)),
        prior_(std::move(prior)),
        facets_(std::move(facets)),
        kinks_(std::move(kinks)),
        kinks_exhaustive_(kinks_exhaustive),
        name_(std::move(name)) {
    prior_coord_ = chart_.apply(prior_);
  }

  std::string family() const override { return name_; }
  double psi(const Belief& p) const override { return psi_(p); }
  Polytope subdiff(const Vec& ybar) const override { return subdiff_(ybar); }
  const Chart& chart() const override { return chart_; }
  const Belief& prior() const override { return prior_; }
  const Vec& prior_coord() const override { return prior_coord_; }
  std::vector<Halfspace> domain_facets() const override { return facets_; }
  std::vector<Vec> kink_coords() const override { return kinks_; }
  bool kinks_exhaustive() const override { return kinks_exhaustive_; }

 private:
  std::function<double(const Belief&)> psi_;
  std::function<Polytope(const Vec&)> subdiff_;
  Chart chart_;
  Belief prior_;
  Vec prior_coord_;
  std::vector<Halfspace> facets_;
  std::vector<Vec> kinks_;
  bool kinks_exhaustive_;
  std::string name_;
};

}  // namespace

CostPtr make_entropy_cost(const Belief& prior) { return std::make_shared<EntropyCost>(prior); }

CostPtr make_quadratic_cost(const Belief& prior, double weight) {
  if (weight < 0.0) throw Error(ErrorCode::NonConvexSpec, "negative quadratic weight");
  if (prior.size() == 2) {
    double q = prior[1];
    std::vector<PwqCell> cells{{0.0, 1.0, weight, -2.0 * weight * q, weight * q * q}};
    return std::make_shared<PwqCost>(prior, std::move(cells), std::vector<double>{}, "quadratic");
  }
  return std::make_shared<QuadraticMultiCost>(prior, weight);
}

CostPtr make_kinked_cost(const Belief& prior, double weight, double quad) {
  if (prior.size() != 2) throw Error(ErrorCode::NotTwoStates, "kinked cost is two-state");
  return make_kinked_cost(prior, weight, quad, prior[1]);
}

CostPtr make_kinked_cost(const Belief& prior, double weight, double quad, double kink) {
  if (prior.size() != 2) throw Error(ErrorCode::NotTwoStates, "kinked cost is two-state");
  if (weight < 0.0 || quad < 0.0) throw Error(ErrorCode::NonConvexSpec, "negative coefficient");
  if (kink < 0.0 || kink > 1.0) throw Error(ErrorCode::OutsideDomain, "kink outside [0, 1]");
  std::vector<PwqCell> cells;
  // w |y - k| + quad (y - k)^2, split at the kink
  if (kink > 1e-9) {
    cells.push_back({0.0, kink, quad, -2.0 * quad * kink - weight, quad * kink * kink + weight * kink});
  }
  if (kink < 1.0 - 1e-9) {
    cells.push_back({kink, 1.0, quad, -2.0 * quad * kink + weight, quad * kink * kink - weight * kink});
  }
  std::vector<double> kinks;
  if (kink > 1e-9 && kink < 1.0 - 1e-9) kinks.push_back(kink);
  return std::make_shared<PwqCost>(prior, std::move(cells), std::move(kinks), "kinked_abs_quad");
}

CostPtr make_custom_pwq_cost(const Belief& prior, std::vector<PwqCell> cells,
                             std::vector<double> declared_kinks) {
  return std::make_shared<PwqCost>(prior, std::move(cells), std::move(declared_kinks),
                                   "custom_pwq");
}

CostPtr rechart_cost(const CostPtr& base, const std::vector<Vec>& R, const Vec& t) {
  return std::make_shared<RechartedCost>(base, R, t);
}

double psi_value(const CostModel& model, const Belief& p) { return model.psi(p); }

Polytope psi_subdiff(const CostModel& model, const Vec& ybar) { return model.subdiff(ybar); }

double cost_of(const CostModel& model, const PosteriorDistribution& pi) {
  if (max_norm_dist(pi.prior, model.prior()) > 1e-12) {
    throw Error(ErrorCode::PriorMismatch, "distribution prior differs from the model prior");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < pi.support.size(); ++j) {
    double v = model.psi(pi.support[j]);
    if (v == kInf) return kInf;
    total += pi.probs[j] * v;
  }
  return total;
}

double uniform_cost(const CostModel& model, const Belief& q, const PosteriorDistribution& pi) {
  if (max_norm_dist(pi.prior, q) > 1e-12) {
    throw Error(ErrorCode::PriorMismatch, "pi must be centered at q");
  }
  double base = model.psi(q);
  if (base == kInf) throw Error(ErrorCode::OutsideDomain, "q outside the domain");
  double total = 0.0;
  for (std::size_t j = 0; j < pi.support.size(); ++j) {
    double v = model.psi(pi.support[j]);
    if (v == kInf) throw Error(ErrorCode::OutsideDomain, "support point outside the domain");
    total += pi.probs[j] * v;
  }
  return total - base;
}

FinitePsiModel make_finite_psi_model(std::vector<PsiComponent> components, const Belief& prior) {
  if (components.empty()) throw Error(ErrorCode::EmptyDomain, "no cost components");
  FinitePsiModel m;
  m.chart = full_simplex_chart(prior.size());
  m.prior = prior;
  m.prior_coord = m.chart.apply(prior);
  m.normalizer = -kInf;
  for (const PsiComponent& c : components) {
    m.normalizer = std::max(m.normalizer, c.value(m.prior_coord));
  }
  m.components = std::move(components);
  return m;
}

double finite_max_cost(const FinitePsiModel& model, const PosteriorDistribution& pi) {
  if (max_norm_dist(pi.prior, model.prior) > 1e-12) {
    throw Error(ErrorCode::PriorMismatch, "distribution prior differs from the model prior");
  }
  double worst = -kInf;
  for (const PsiComponent& c : model.components) {
    double total = 0.0;
    for (std::size_t j = 0; j < pi.support.size(); ++j) {
      total += pi.probs[j] * c.value(model.chart.apply(pi.support[j]));
    }
    worst = std::max(worst, total);
  }
  return worst - model.normalizer;
}

RawCost as_raw(const CostPtr& model) {
  RawCost raw;
  raw.name = model->family();
  raw.psi = [model](const Belief& p) { return model->psi(p); };
  raw.domain_facets = model->domain_facets();
  raw.subgrad_full = [model](const Belief& p) {
    Polytope sub = model->subdiff(model->chart().apply(p));
    std::vector<Vec> out;
    for (const Vec& lam : sub.vertices) {
      // v = A^T lambda reproduces lambda under any chart with C A^T = I
      Vec v(model->chart().states, 0.0);
      for (std::size_t s = 0; s < v.size(); ++s) {
        for (std::size_t i = 0; i < lam.size(); ++i) v[s] += model->chart().A[i][s] * lam[i];
      }
      out.push_back(std::move(v));
    }
    return out;
  };
  for (const Vec& k : model->kink_coords()) raw.kinks.push_back(model->chart().invert(k));
  raw.kinks_follow_model = model->kinks_exhaustive();
  return raw;
}

CostPtr canonicalize(const RawCost& raw, const Belief& prior, CanonicalizeReport* report) {
  const std::size_t n = prior.size();
  double f0 = raw.psi(prior);
  if (!std::isfinite(f0)) {
    throw Error(ErrorCode::PriorOutsideDomain, "raw cost is infinite at the prior");
  }
  for (const Halfspace& h : raw.domain_facets) {
    double slack = h.c - dot(h.a, prior.w);
    if (slack < -kFacetSlack) {
      throw Error(ErrorCode::PriorOutsideDomain, "prior violates a domain facet");
    }
  }

  // face restriction: normals of all constraints active at the prior
  std::vector<Vec> active;
  for (std::size_t i = 0; i < n; ++i) {
    if (prior[i] <= kFacetSlack) {
      Vec e(n, 0.0);
      e[i] = 1.0;
      active.push_back(std::move(e));
    }
  }
  for (const Halfspace& h : raw.domain_facets) {
    if (std::abs(h.c - dot(h.a, prior.w)) <= kFacetSlack) active.push_back(h.a);
  }

  Chart chart;
  if (active.empty()) {
    chart = full_simplex_chart(n);
  } else {
    // orthonormal basis of directions tangent to every active constraint
    std::vector<Vec> span;
    Vec ones(n, 1.0);
    std::vector<Vec> normals = active;
    normals.push_back(ones);
    for (std::size_t i = 0; i < n; ++i) {
      Vec v(n, 0.0);
      v[i] = 1.0;
      for (const Vec& nm : normals) {
        double nn = norm2(nm);
        if (nn < 1e-18) continue;
        double f = dot(v, nm) / nn;
        for (std::size_t s = 0; s < n; ++s) v[s] -= f * nm[s];
      }
      for (const Vec& e : span) {
        double f = dot(v, e);
        for (std::size_t s = 0; s < n; ++s) v[s] -= f * e[s];
      }
      double nv = std::sqrt(norm2(v));
      if (nv > 1e-10) {
        for (double& x : v) x /= nv;
        span.push_back(std::move(v));
      }
    }
    if (span.empty()) {
      throw Error(ErrorCode::EmptyDomain, "face through the prior is a single point");
    }
    chart.states = n;
    chart.dim = span.size();
    chart.A.assign(chart.dim, Vec(n, 0.0));
    chart.b.assign(chart.dim, 0.0);
    chart.C.assign(n, Vec(chart.dim, 0.0));
    chart.d = prior.w;
    for (std::size_t i = 0; i < chart.dim; ++i) {
      chart.A[i] = span[i];
      chart.b[i] = -dot(span[i], prior.w);
      for (std::size_t s = 0; s < n; ++s) chart.C[s][i] = span[i][s];
    }
  }
  Vec prior_coord = chart.apply(prior);

  // convexity probe along random chords through the sampled domain
  {
    Rng rng(0xc4a0'11ce);
    int tested = 0;
    auto sample = [&]() -> Belief {
      for (int tries = 0; tries < 64; ++tries) {
        Vec y(prior_coord);
        for (double& c : y) c += rng.uniform(-0.6, 0.6);
        Vec p(n, 0.0);
        bool ok = true;
        for (std::size_t s = 0; s < n; ++s) {
          p[s] = chart.d[s];
          for (std::size_t i = 0; i < chart.dim; ++i) p[s] += chart.C[s][i] * y[i];
          ok = ok && p[s] >= 0.0 && p[s] <= 1.0;
        }
        if (!ok) continue;
        Belief q = make_belief(std::move(p));
        if (std::isfinite(raw.psi(q))) return q;
      }
      return prior;
    };
    for (int i = 0; i < 200; ++i) {
      Belief x = sample();
      Belief z = sample();
      Vec mid(n);
      for (std::size_t s = 0; s < n; ++s) mid[s] = 0.5 * (x[s] + z[s]);
      Belief m = make_belief(std::move(mid));
      double fm = raw.psi(m);
      double fx = raw.psi(x), fz = raw.psi(z);
      if (std::isfinite(fx) && std::isfinite(fz) && fm > 0.5 * (fx + fz) + 1e-9) {
        throw Error(ErrorCode::NonConvexInput, "midpoint convexity failed on a sampled chord");
      }
      tested++;
    }
    (void)tested;
  }

  // minimal-norm subgradient at the prior, in chart coordinates
  std::vector<Vec> verts_full = raw.subgrad_full(prior);
  if (verts_full.empty()) {
    throw Error(ErrorCode::PriorOutsideDomain, "no subgradient supplied at the prior");
  }
  Polytope sub_prior;
  for (const Vec& v : verts_full) {
    Vec lam(chart.dim, 0.0);
    for (std::size_t i = 0; i < chart.dim; ++i) {
      for (std::size_t s = 0; s < n; ++s) lam[i] += chart.C[s][i] * v[s];
    }
    sub_prior.vertices.push_back(std::move(lam));
  }
  Vec g = min_norm_point(sub_prior);
  bool non_unique = !sub_prior.singleton(1e-10);

  if (report) {
    report->face_restrictions = active.size();
    report->subtracted_value = f0;
    report->subtracted_slope = g;
    report->non_unique = non_unique;
  }

  auto raw_psi = raw.psi;
  auto facets = raw.domain_facets;
  Chart ch = chart;
  Vec pc = prior_coord;
  bool restricted = !active.empty();
  auto psi_fn = [raw_psi, facets, ch, pc, f0, g, restricted](const Belief& p) -> double {
    for (const Halfspace& h : facets) {
      if (dot(h.a, p.w) > h.c + 1e-10) return kInf;
    }
    Vec y = ch.apply(p);
    if (restricted) {
      // off the restricted affine hull means outside the domain
      for (std::size_t s = 0; s < p.size(); ++s) {
        double back = ch.d[s];
        for (std::size_t i = 0; i < ch.dim; ++i) back += ch.C[s][i] * y[i];
        if (std::abs(back - p[s]) > 1e-9) return kInf;
      }
    }
    double v = raw_psi(p);
    if (!std::isfinite(v)) return kInf;
    double shift = f0;
    for (std::size_t i = 0; i < y.size(); ++i) shift += g[i] * (y[i] - pc[i]);
    return v - shift;
  };
  auto raw_sub = raw.subgrad_full;
  auto sub_fn = [raw_sub, ch, g](const Vec& ybar) {
    Belief p = ch.invert(ybar);
    Polytope out;
    for (const Vec& v : raw_sub(p)) {
      Vec lam(ch.dim, 0.0);
      for (std::size_t i = 0; i < ch.dim; ++i) {
        for (std::size_t s = 0; s < p.size(); ++s) lam[i] += ch.C[s][i] * v[s];
      }
      for (std::size_t i = 0; i < ch.dim; ++i) lam[i] -= g[i];
      out.vertices.push_back(std::move(lam));
    }
    return out;
  };

  std::vector<Vec> kink_coords;
  for (const Belief& k : raw.kinks) {
    if (std::isfinite(psi_fn(k))) kink_coords.push_back(chart.apply(k));
  }
  return std::make_shared<CanonicalCost>(psi_fn, sub_fn, chart, prior, facets,
                                         std::move(kink_coords), raw.kinks_follow_model,
                                         raw.name + "|canonical");
}

// ---------------------------------------------------------------------------
// grids

void chart_interval(const CostModel& model, double* lo, double* hi) {
  const Chart& ch = model.chart();
  if (ch.dim != 1) throw Error(ErrorCode::UnsupportedCostFamily, "interval needs a 1-D chart");
  double l = -kInf, h = kInf;
  auto fold = [&l, &h](double c1, double c0, double bound) {
    // c0 + c1 y >= bound
    if (c1 > 1e-14) {
      l = std::max(l, (bound - c0) / c1);
    } else if (c1 < -1e-14) {
      h = std::min(h, (bound - c0) / c1);
    }
  };
  const double mc = std::max(0.0, model.grid_min_coordinate());
  for (std::size_t s = 0; s < ch.states; ++s) fold(ch.C[s][0], ch.d[s], mc);
  for (const Halfspace& f : model.domain_facets()) {
    double c1 = 0.0, c0 = 0.0;
    for (std::size_t s = 0; s < ch.states; ++s) {
      c1 += f.a[s] * ch.C[s][0];
      c0 += f.a[s] * ch.d[s];
    }
    fold(-c1, f.c - c0, 0.0);  // c0 + c1 y <= c  ==  (c - c0) - c1 y >= 0
  }
  if (!(l < h)) throw Error(ErrorCode::EmptyDomain, "domain interval is empty");
  *lo = l;
  *hi = h;
}

Grid make_grid(const CostModel& model, std::size_t resolution, const std::vector<Vec>& extra_knots) {
  if (resolution < 2) throw Error(ErrorCode::ResolutionTooSmall, "need at least two lattice points");
  const Chart& ch = model.chart();
  Grid grid;
  grid.chart = ch;
  grid.resolution = resolution;

  std::vector<Vec> coords;
  const double clamp = model.grid_min_coordinate();
  if (ch.dim == 1) {
    double lo, hi;
    chart_interval(model, &lo, &hi);
    grid.clamped = clamp > 0.0;
    for (std::size_t i = 0; i < resolution; ++i) {
      double y = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(resolution - 1);
      coords.push_back(Vec{y});
    }
    for (const Vec& k : model.kink_coords()) coords.push_back(k);
    coords.push_back(model.prior_coord());
    for (const Vec& k : extra_knots) {
      if (k.size() != 1) throw Error(ErrorCode::BadWeights, "knot has wrong dimension");
      double y = k[0];
      if (y < lo - 1e-9 || y > hi + 1e-9) {
        if (clamp > 0.0 && y >= -1e-9 && y <= 1.0 + 1e-9) {
          grid.clamped = true;  // vertex knot pulled inside the clamped range
        } else {
          throw Error(ErrorCode::OutsideDomain, "extra knot outside the domain interval");
        }
      }
      coords.push_back(Vec{std::clamp(y, lo, hi)});
    }
    std::sort(coords.begin(), coords.end(),
              [](const Vec& a, const Vec& b) { return a[0] < b[0]; });
  } else {
    // lattice over the box, filtered to the domain
    const double mc = std::max(0.0, clamp);
    for (std::size_t flat = 0;; ++flat) {
      // odometer over dim digits in [0, resolution)
      std::size_t rem = flat;
      Vec y(ch.dim);
      bool done = false;
      for (std::size_t i = 0; i < ch.dim; ++i) {
        std::size_t digit = rem % resolution;
        rem /= resolution;
        y[i] = mc + (1.0 - mc) * static_cast<double>(digit) / static_cast<double>(resolution - 1);
      }
      if (rem > 0) done = true;
      if (done) break;
      double tail = 1.0;
      for (double v : y) tail -= v;
      if (tail < mc - 1e-12) continue;
      bool inside = true;
      try {
        Belief p = ch.invert(y);
        inside = model.in_domain(p);
        for (std::size_t s = 0; inside && s < p.size(); ++s) inside = p[s] >= mc - 1e-12;
      } catch (const Error&) {
        inside = false;
      }
      if (inside) coords.push_back(std::move(y));
    }
    grid.clamped = clamp > 0.0;
    for (const Vec& k : model.kink_coords()) coords.push_back(k);
    coords.push_back(model.prior_coord());
    for (const Vec& k : extra_knots) {
      if (k.size() != ch.dim) throw Error(ErrorCode::BadWeights, "knot has wrong dimension");
      Belief p = ch.invert(k);
      if (!model.in_domain(p)) throw Error(ErrorCode::OutsideDomain, "extra knot outside the domain");
      bool clamped_out = false;
      for (std::size_t s = 0; s < p.size(); ++s) clamped_out = clamped_out || p[s] < mc - 1e-12;
      if (clamped_out) {
        grid.clamped = true;
        continue;
      }
      coords.push_back(k);
    }
    std::sort(coords.begin(), coords.end());
  }

  // dedup after sorting; two passes are unnecessary for 1-D but harmless
  std::vector<Vec> unique_coords;
  for (const Vec& y : coords) {
    bool dup = false;
    if (!unique_coords.empty()) {
      const Vec& last = unique_coords.back();
      double dist = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) dist = std::max(dist, std::abs(y[i] - last[i]));
      dup = dist <= kTolDedup;
    }
    if (!dup) unique_coords.push_back(y);
  }

  grid.coords = std::move(unique_coords);
  grid.points.reserve(grid.coords.size());
  for (const Vec& y : grid.coords) grid.points.push_back(ch.invert(y));

  const Vec& pc = model.prior_coord();
  bool found = false;
  for (std::size_t j = 0; j < grid.coords.size(); ++j) {
    double dist = 0.0;
    for (std::size_t i = 0; i < pc.size(); ++i) {
      dist = std::max(dist, std::abs(grid.coords[j][i] - pc[i]));
    }
    if (dist <= 1e-9) {
      grid.prior_index = j;
      found = true;
      break;
    }
  }
  if (!found) throw Error(ErrorCode::InfeasibleGrid, "prior fell out of the grid");
  return grid;
}

}  // namespace ricav
