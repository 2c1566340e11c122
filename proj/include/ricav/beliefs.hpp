#ifndef RICAV_BELIEFS_HPP
#define RICAV_BELIEFS_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace ricav {

using Vec = std::vector<double>;

inline constexpr double kTolSimplex = 1e-12;   // weight sum slack before rejection
inline constexpr double kTolBarycenter = 1e-9; // posterior mean vs prior
inline constexpr double kTolDedup = 1e-12;     // max-norm distance treated as equal

// Probability vector over a finite state space. Always normalized; weights
// within kTolSimplex of zero are clamped to zero at construction.
struct Belief {
  Vec w;

  std::size_t size() const { return w.size(); }
  double operator[](std::size_t i) const { return w[i]; }
};

Belief make_belief(Vec weights);

double max_norm_dist(const Belief& a, const Belief& b);

// Finite-support distribution over posteriors whose mean is the prior.
// Duplicate support points (max-norm <= kTolDedup) are merged at construction.
struct PosteriorDistribution {
  std::vector<Belief> support;
  Vec probs;
  Belief prior;
};

PosteriorDistribution make_posterior_distribution(std::vector<Belief> support, Vec probs,
                                                  Belief prior);

Belief barycenter(const std::vector<Belief>& support, const Vec& probs);

// Affine coordinates on aff(dom psi): y = A p + b with right inverse
// p = C y + d, bijective between the domain's affine hull and R^dim.
struct Chart {
  std::size_t states = 0;
  std::size_t dim = 0;
  std::vector<Vec> A;  // dim rows of length states
  Vec b;
  std::vector<Vec> C;  // states rows of length dim
  Vec d;

  Vec apply(const Belief& p) const;
  Belief invert(const Vec& y) const;
  // u . p = slope . (A p + b) + const for all p on the simplex
  Vec pullback_slope(const Vec& slope) const;
};

// Drop-first-coordinate chart: y_i = p(state i+1). The first state's
// probability is the one implicitly determined.
Chart full_simplex_chart(std::size_t states);

// Affine-rank chart through the given points. Returns the full-simplex chart
// when the points span the whole simplex, otherwise an orthonormal-basis chart
// anchored at points[0].
Chart build_chart(const std::vector<Belief>& spanning_points);

// Replace the selected support points by their probability-weighted barycenter.
// A mean-preserving contraction; the result is Blackwell-dominated.
PosteriorDistribution garble(const PosteriorDistribution& pi, std::vector<std::size_t> merge_indices);

// Evaluation lattice in chart coordinates. Produced by make_grid (costs.hpp):
// uniform lattice intersected with the domain, plus prior, declared kinks and
// caller knots, deduplicated.
struct Grid {
  Chart chart;
  std::vector<Belief> points;
  std::vector<Vec> coords;
  std::size_t resolution = 0;
  bool clamped = false;  // entropy-family vertex clamp applied
  std::size_t prior_index = 0;
};

}  // namespace ricav

#endif
