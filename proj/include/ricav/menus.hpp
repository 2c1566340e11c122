#ifndef RICAV_MENUS_HPP
#define RICAV_MENUS_HPP

#include <optional>
#include <string>
#include <vector>

#include "ricav/beliefs.hpp"

namespace ricav {

// State-contingent utility vector. Entries must be finite.
struct UtilityAct {
  Vec u;
  std::string label;

  double expectation(const Belief& p) const {
    double v = 0.0;
    for (std::size_t s = 0; s < u.size(); ++s) v += u[s] * p[s];
    return v;
  }
};

UtilityAct make_act(Vec utilities, std::string label = "");

// Finite nonempty set of acts; duplicates (componentwise within kTolDedup)
// are removed keeping the first occurrence.
struct Menu {
  std::vector<UtilityAct> acts;

  std::size_t size() const { return acts.size(); }
};

Menu make_menu(std::vector<UtilityAct> acts);

struct PhiValue {
  double value;
  std::vector<std::size_t> argmax;  // ties within kTolDedup, ascending index
};

// phi_F(p) = max_{f in F} E_p[f]
PhiValue menu_phi(const Menu& menu, const Belief& p);

// {alpha f + (1-alpha) g : f in F, g in G}
Menu menu_mix(double alpha, const Menu& f, const Menu& g);

struct MenuSetOps {
  Menu union_menu;
  std::optional<Menu> intersection;  // empty intersection is a reported state
};

MenuSetOps set_ops(const Menu& f, const Menu& g);

// Shift every act by h (statewise).
Menu translate_menu(const Menu& menu, const UtilityAct& h);

// The act whose expectation at every p equals slope . (ybar - anchor) + level,
// where ybar is p's chart image. Exact on the whole simplex.
UtilityAct act_from_affine(const Chart& chart, const Vec& slope, const Vec& anchor, double level,
                           std::string label = "");

bool acts_equal(const UtilityAct& a, const UtilityAct& b);

}  // namespace ricav

#endif
