#include "ricav/envelope.hpp"

#include <algorithm>
#include <cmath>

#include "ricav/errors.hpp"

namespace ricav {

double PiecewiseNet::eval(double y) const {
  for (const NetPiece& p : pieces) {
    if (y <= p.hi + 1e-13) return p.eval(std::clamp(y, p.lo, p.hi));
  }
  return pieces.back().eval(y);
}

namespace {

struct ActAffine {
  double alpha, beta;  // expected payoff alpha y + beta in chart coordinates
};

std::vector<ActAffine> act_lines(const CostModel& model, const Menu& menu) {
  if (menu.acts.empty()) throw Error(ErrorCode::EmptyMenu, "menu has no acts");
  const Chart& ch = model.chart();
  std::vector<ActAffine> out;
  for (const UtilityAct& f : menu.acts) {
    if (f.u.size() != ch.states) throw Error(ErrorCode::BadAct, "act has wrong state count");
    double alpha = 0.0, beta = 0.0;
    for (std::size_t s = 0; s < ch.states; ++s) {
      alpha += f.u[s] * ch.C[s][0];
      beta += f.u[s] * ch.d[s];
    }
    out.push_back({alpha, beta});
  }
  return out;
}

struct Line {
  double s, m;  // y -> s y + m
  double eval(double y) const { return s * y + m; }
};

}  // namespace

PiecewiseNet build_piecewise_net(const CostModel& model, const Menu& menu,
                                 const std::vector<double>& extra_breaks) {
  if (!model.is_pwq() || model.chart().dim != 1) {
    throw Error(ErrorCode::UnsupportedCostFamily,
                "net construction needs a 1-D piecewise-quadratic cost");
  }
  std::vector<PwqCell> cells = model.cells();
  std::vector<ActAffine> lines = act_lines(model, menu);
  const double lo = cells.front().lo, hi = cells.back().hi;

  std::vector<double> breaks{lo, hi};
  for (const PwqCell& c : cells) {
    breaks.push_back(c.lo);
    breaks.push_back(c.hi);
  }
  for (std::size_t f = 0; f < lines.size(); ++f) {
    for (std::size_t g = f + 1; g < lines.size(); ++g) {
      double da = lines[f].alpha - lines[g].alpha;
      if (std::abs(da) < 1e-13) continue;
      double y = (lines[g].beta - lines[f].beta) / da;
      if (y > lo + 1e-12 && y < hi - 1e-12) breaks.push_back(y);
    }
  }
  for (double y : extra_breaks) {
    if (y > lo - 1e-9 && y < hi + 1e-9) breaks.push_back(std::clamp(y, lo, hi));
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
               breaks.end());

  PiecewiseNet net;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double a = breaks[i], b = breaks[i + 1];
    double mid = 0.5 * (a + b);
    std::size_t best = 0;
    double bestv = -kInf;
    for (std::size_t f = 0; f < lines.size(); ++f) {
      double v = lines[f].alpha * mid + lines[f].beta;
      if (v > bestv + 1e-13) {
        bestv = v;
        best = f;
      }
    }
    const PwqCell* cell = nullptr;
    for (const PwqCell& c : cells) {
      if (mid >= c.lo - 1e-13 && mid <= c.hi + 1e-13) {
        cell = &c;
        break;
      }
    }
    if (!cell) throw Error(ErrorCode::SolverError, "net piece fell outside every cell");
    NetPiece p;
    p.lo = a;
    p.hi = b;
    p.A = -cell->a;
    p.B = lines[best].alpha - cell->b;
    p.C = lines[best].beta - cell->c;
    p.act = best;
    net.pieces.push_back(p);
  }
  if (net.pieces.empty()) throw Error(ErrorCode::EmptyDomain, "degenerate chart interval");
  return net;
}

void difference_quotient_range(const PiecewiseNet& net, double x0, double v, double* sup_right,
                               double* inf_left) {
  double sr = -kInf, il = kInf;
  double scale = 1.0 + std::abs(v);
  for (const NetPiece& p : net.pieces) scale = std::max(scale, std::abs(p.eval(p.lo)));

  for (const NetPiece& p : net.pieces) {
    auto quotient = [&p, x0, v](double y) { return (p.eval(y) - v) / (y - x0); };
    auto offer_point = [&](double y) {
      if (y < p.lo - 1e-12 || y > p.hi + 1e-12) return;
      y = std::clamp(y, p.lo, p.hi);
      if (std::abs(y - x0) <= 1e-13) return;
      double g = quotient(y);
      if (y > x0) {
        sr = std::max(sr, g);
      } else {
        il = std::min(il, g);
      }
    };
    offer_point(p.lo);
    offer_point(p.hi);
    if (std::abs(p.A) > 1e-14) {
      // stationary points of ((A y^2 + B y + C) - v) / (y - x0)
      double rad = x0 * x0 + (p.B * x0 + p.C - v) / p.A;
      if (rad >= 0.0) {
        double r = std::sqrt(rad);
        offer_point(x0 - r);
        offer_point(x0 + r);
      }
    }
    // limit at the anchor itself: the one-sided slope, valid when v = N(x0)
    bool touches = std::abs(p.lo - x0) <= 1e-13 || std::abs(p.hi - x0) <= 1e-13;
    if (touches && std::abs(p.eval(x0) - v) <= 1e-11 * scale) {
      double s = p.slope(x0);
      if (std::abs(p.lo - x0) <= 1e-13) {
        sr = std::max(sr, s);
      } else {
        il = std::min(il, s);
      }
    }
  }
  *sup_right = sr;
  *inf_left = il;
}

Cav1dResult concavify_1d_exact(const CostModel& model, const Menu& menu) {
  const double x0 = model.prior_coord()[0];
  PiecewiseNet net = build_piecewise_net(model, menu, {x0});

  std::vector<double> pts;
  pts.push_back(net.pieces.front().lo);
  for (const NetPiece& p : net.pieces) pts.push_back(p.hi);
  std::vector<double> ptv;
  for (double y : pts) ptv.push_back(net.eval(y));

  double scale = 1.0;
  for (double v : ptv) scale = std::max(scale, std::abs(v));

  std::vector<Line> cands;
  // chords through partition-point pairs
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double dx = pts[j] - pts[i];
      if (dx <= 1e-12) continue;
      double s = (ptv[j] - ptv[i]) / dx;
      cands.push_back({s, ptv[i] - s * pts[i]});
    }
  }
  // tangents from a partition point to a curved piece
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (const NetPiece& p : net.pieces) {
      if (std::abs(p.A) < 1e-14) continue;
      double rad = pts[i] * pts[i] + (p.C + p.B * pts[i] - ptv[i]) / p.A;
      if (rad < 0.0) continue;
      double r = std::sqrt(rad);
      for (double yt : {pts[i] - r, pts[i] + r}) {
        if (yt < p.lo - 1e-10 || yt > p.hi + 1e-10) continue;
        double s = p.slope(std::clamp(yt, p.lo, p.hi));
        cands.push_back({s, ptv[i] - s * pts[i]});
      }
    }
  }
  // common tangents of curved piece pairs
  for (std::size_t i = 0; i < net.pieces.size(); ++i) {
    const NetPiece& p1 = net.pieces[i];
    if (std::abs(p1.A) < 1e-14) continue;
    for (std::size_t j = i + 1; j < net.pieces.size(); ++j) {
      const NetPiece& p2 = net.pieces[j];
      if (std::abs(p2.A) < 1e-14) continue;
      double dB = p1.B - p2.B;
      std::vector<double> roots;
      double qa = 4.0 * p1.A * (p1.A - p2.A);
      double qb = 4.0 * p1.A * dB;
      double qc = dB * dB + 4.0 * p2.A * (p1.C - p2.C);
      if (std::abs(qa) > 1e-14) {
        double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0) {
          double r = std::sqrt(disc);
          roots.push_back((-qb - r) / (2.0 * qa));
          roots.push_back((-qb + r) / (2.0 * qa));
        }
      } else if (std::abs(qb) > 1e-14) {
        roots.push_back(-qc / qb);
      }
      for (double y1 : roots) {
        if (y1 < p1.lo - 1e-10 || y1 > p1.hi + 1e-10) continue;
        double y2 = (2.0 * p1.A * y1 + p1.B - p2.B) / (2.0 * p2.A);
        if (y2 < p2.lo - 1e-10 || y2 > p2.hi + 1e-10) continue;
        double s = p1.slope(std::clamp(y1, p1.lo, p1.hi));
        cands.push_back({s, p1.C - p1.A * y1 * y1});
      }
    }
  }
  // a linear piece supports itself
  for (const NetPiece& p : net.pieces) {
    if (std::abs(p.A) < 1e-14) cands.push_back({p.B, p.C});
  }
  // the stay-put line anchored at the prior
  {
    double v0 = net.eval(x0);
    double s_lo, s_hi;
    difference_quotient_range(net, x0, v0, &s_lo, &s_hi);
    if (s_lo <= s_hi + 1e-9) {
      double s = std::clamp(0.0, std::min(s_lo, s_hi), std::max(s_lo, s_hi));
      cands.push_back({s, v0 - s * x0});
    }
  }

  auto domination_margin = [&net](const Line& L) {
    double worst = kInf;
    for (const NetPiece& p : net.pieces) {
      // d(y) = L(y) - N(y) is convex on the piece; exact minimum
      double at_lo = L.eval(p.lo) - p.eval(p.lo);
      double at_hi = L.eval(p.hi) - p.eval(p.hi);
      double m = std::min(at_lo, at_hi);
      if (std::abs(p.A) > 1e-14) {
        double yv = (p.B - L.s) / (-2.0 * p.A);
        if (yv > p.lo && yv < p.hi) m = std::min(m, L.eval(yv) - p.eval(yv));
      }
      worst = std::min(worst, m);
    }
    return worst;
  };

  const double valid_tol = 1e-9 * scale;
  bool found = false;
  Line winner{0.0, 0.0};
  double best = kInf;
  for (const Line& L : cands) {
    if (domination_margin(L) < -valid_tol) continue;
    double v = L.eval(x0);
    if (v < best - 1e-14 * scale) {
      best = v;
      winner = L;
      found = true;
    }
  }
  if (!found) throw Error(ErrorCode::SolverError, "no supporting line survived validation");

  // contact points of the winning line
  auto collect_contacts = [&net, &winner](double tol) {
    std::vector<double> touch;
    for (const NetPiece& p : net.pieces) {
      auto offer = [&](double y) {
        double d = winner.eval(y) - p.eval(y);
        if (std::abs(d) <= tol) touch.push_back(y);
      };
      offer(p.lo);
      offer(p.hi);
      if (std::abs(p.A) > 1e-14) {
        double yv = (p.B - winner.s) / (-2.0 * p.A);
        if (yv > p.lo && yv < p.hi) offer(yv);
      }
    }
    std::sort(touch.begin(), touch.end());
    touch.erase(std::unique(touch.begin(), touch.end(),
                            [](double a, double b) { return std::abs(a - b) <= 1e-10; }),
                touch.end());
    return touch;
  };

  Cav1dResult out;
  out.value = best;
  out.slope = winner.s;
  double tol = 1e-8 * scale;
  std::vector<double> contacts = collect_contacts(tol);
  if (contacts.empty()) contacts = collect_contacts(tol * 100.0);
  out.contacts = contacts;

  auto near_prior = [&](double y) { return std::abs(y - x0) <= 1e-10; };
  bool no_info = std::abs(best - net.eval(x0)) <= tol &&
                 std::any_of(contacts.begin(), contacts.end(), near_prior);
  if (no_info) {
    out.support_coords = {x0};
    out.weights = {1.0};
    return out;
  }
  double left = -kInf, right = kInf;
  for (double c : contacts) {
    if (c <= x0 + 1e-12) left = std::max(left, c);
    if (c >= x0 - 1e-12) right = std::min(right, c);
  }
  if (left == -kInf || right == kInf) {
    throw Error(ErrorCode::SolverError, "contacts of the supporting line do not straddle the prior");
  }
  if (right - left <= 1e-10) {
    out.support_coords = {x0};
    out.weights = {1.0};
    return out;
  }
  out.support_coords = {left, right};
  double wl = (right - x0) / (right - left);
  out.weights = {wl, 1.0 - wl};
  return out;
}

}  // namespace ricav
