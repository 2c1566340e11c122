#include "ricav/menus.hpp"

#include <cmath>

#include "ricav/errors.hpp"

namespace ricav {

UtilityAct make_act(Vec utilities, std::string label) {
  if (utilities.size() < 2) throw Error(ErrorCode::BadAct, "act needs one utility per state");
  for (double x : utilities) {
    if (!std::isfinite(x)) throw Error(ErrorCode::BadAct, "act utilities must be finite");
  }
  return UtilityAct{std::move(utilities), std::move(label)};
}

bool acts_equal(const UtilityAct& a, const UtilityAct& b) {
  if (a.u.size() != b.u.size()) return false;
  for (std::size_t s = 0; s < a.u.size(); ++s) {
    if (std::abs(a.u[s] - b.u[s]) > kTolDedup) return false;
  }
  return true;
}

Menu make_menu(std::vector<UtilityAct> acts) {
  if (acts.empty()) throw Error(ErrorCode::EmptyMenu, "a menu must contain at least one act");
  const std::size_t states = acts.front().u.size();
  Menu m;
  for (UtilityAct& a : acts) {
    if (a.u.size() != states) throw Error(ErrorCode::BadAct, "acts disagree on state count");
    bool dup = false;
    for (const UtilityAct& kept : m.acts) {
      if (acts_equal(kept, a)) {
        dup = true;
        break;
      }
    }
    if (!dup) m.acts.push_back(std::move(a));
  }
  return m;
}

PhiValue menu_phi(const Menu& menu, const Belief& p) {
  PhiValue out{-1e300, {}};
  for (std::size_t i = 0; i < menu.acts.size(); ++i) {
    double v = menu.acts[i].expectation(p);
    if (v > out.value + kTolDedup) {
      out.value = v;
      out.argmax.assign(1, i);
    } else if (v >= out.value - kTolDedup) {
      out.argmax.push_back(i);
      if (v > out.value) out.value = v;
    }
  }
  return out;
}

Menu menu_mix(double alpha, const Menu& f, const Menu& g) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::AlphaOutOfRange, "mixing weight must lie in [0, 1]");
  }
  std::vector<UtilityAct> acts;
  for (const UtilityAct& a : f.acts) {
    for (const UtilityAct& b : g.acts) {
      Vec u(a.u.size());
      for (std::size_t s = 0; s < u.size(); ++s) u[s] = alpha * a.u[s] + (1.0 - alpha) * b.u[s];
      std::string label = a.label.empty() && b.label.empty() ? std::string()
                                                            : a.label + "|" + b.label;
      acts.push_back(UtilityAct{std::move(u), std::move(label)});
    }
  }
  return make_menu(std::move(acts));
}

MenuSetOps set_ops(const Menu& f, const Menu& g) {
  std::vector<UtilityAct> u = f.acts;
  for (const UtilityAct& b : g.acts) u.push_back(b);

  std::vector<UtilityAct> common;
  for (const UtilityAct& a : f.acts) {
    for (const UtilityAct& b : g.acts) {
      if (acts_equal(a, b)) {
        common.push_back(a);
        break;
      }
    }
  }
  MenuSetOps out{make_menu(std::move(u)), std::nullopt};
  if (!common.empty()) out.intersection = make_menu(std::move(common));
  return out;
}

Menu translate_menu(const Menu& menu, const UtilityAct& h) {
  if (h.u.size() != menu.acts.front().u.size()) {
    throw Error(ErrorCode::BadAct, "shift act has wrong state count");
  }
  std::vector<UtilityAct> acts;
  for (const UtilityAct& a : menu.acts) {
    Vec u(a.u.size());
    for (std::size_t s = 0; s < u.size(); ++s) u[s] = a.u[s] + h.u[s];
    acts.push_back(UtilityAct{std::move(u), a.label});
  }
  return make_menu(std::move(acts));
}

UtilityAct act_from_affine(const Chart& chart, const Vec& slope, const Vec& anchor, double level,
                           std::string label) {
  if (slope.size() != chart.dim || anchor.size() != chart.dim) {
    throw Error(ErrorCode::BadAct, "slope and anchor must live in chart coordinates");
  }
  Vec u = chart.pullback_slope(slope);
  double shift = level;
  for (std::size_t i = 0; i < chart.dim; ++i) shift += slope[i] * (chart.b[i] - anchor[i]);
  for (double& x : u) x += shift;
  return make_act(std::move(u), std::move(label));
}

}  // namespace ricav
