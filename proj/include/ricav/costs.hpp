#ifndef RICAV_COSTS_HPP
#define RICAV_COSTS_HPP

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "ricav/beliefs.hpp"

namespace ricav {

inline constexpr double kFacetSlack = 1e-9;     // relative-interior test
inline constexpr double kEntropyClamp = 1e-9;   // grid distance from simplex vertices
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Halfspace a . p <= c over belief coordinates, beyond the simplex itself.
struct Halfspace {
  Vec a;
  double c;
};

// Convex polytope by vertex list, in chart coordinates.
struct Polytope {
  std::vector<Vec> vertices;

  bool singleton(double tol = 1e-10) const;
};

Vec min_norm_point(const Polytope& poly);
// Membership in conv(vertices), by small-LP feasibility.
bool polytope_contains(const Polytope& poly, const Vec& x, double tol = 1e-9);

// sup_{y in Y} s y - psibar(y) together with the argmax interval. 1-D only.
struct ConjEval {
  double value;
  double ymin;
  double ymax;
};

// One quadratic cell of a 1-D piecewise-quadratic cost: a y^2 + b y + c on [lo, hi].
struct PwqCell {
  double lo, hi;
  double a, b, c;

  double eval(double y) const { return (a * y + b) * y + c; }
  double slope(double y) const { return 2.0 * a * y + b; }
};

// Canonical posterior-separable cost: convex psi with psi(prior) = 0, psi >= 0,
// prior in the relative interior of the domain. Constructors normalize, so
// instances always satisfy the canonical form. Subdifferentials are analytic
// (exact vertex lists), never finite-differenced.
class CostModel {
 public:
  virtual ~CostModel() = default;

  virtual std::string family() const = 0;
  // +infinity exactly when p is outside the domain
  virtual double psi(const Belief& p) const = 0;
  // Vertex list of the subdifferential of psibar at a chart point. At a
  // boundary point of the chart image the list is truncated to the finite
  // one-sided extreme (the full subdifferential there is unbounded).
  virtual Polytope subdiff(const Vec& ybar) const = 0;
  virtual const Chart& chart() const = 0;
  virtual const Belief& prior() const = 0;
  virtual const Vec& prior_coord() const = 0;
  virtual std::vector<Halfspace> domain_facets() const { return {}; }
  virtual std::vector<Vec> kink_coords() const { return {}; }
  // true when kink_coords lists every non-differentiability
  virtual bool kinks_exhaustive() const { return true; }
  virtual double grid_min_coordinate() const { return 0.0; }

  // Exact 1-D machinery. has_exact_1d guards conjugate(); is_pwq guards cells().
  virtual bool has_exact_1d() const { return false; }
  virtual ConjEval conjugate(double) const;
  virtual bool is_pwq() const { return false; }
  virtual std::vector<PwqCell> cells() const;

  double psi_bar(const Vec& ybar) const { return psi(chart().invert(ybar)); }
  bool in_domain(const Belief& p) const { return psi(p) < kInf; }
};

using CostPtr = std::shared_ptr<const CostModel>;

// Relative-entropy cost KL(p || prior). Finite on the whole simplex
// (0 ln 0 = 0); grids keep coordinates >= kEntropyClamp because the gradient
// blows up at the vertices.
CostPtr make_entropy_cost(const Belief& prior);
// weight * squared chart distance to the prior
CostPtr make_quadratic_cost(const Belief& prior, double weight);
// weight * |ybar - kink| + quad * (ybar - kink)^2, two states, canonicalized
// when the kink is away from the prior. kink defaults to the prior coordinate.
CostPtr make_kinked_cost(const Belief& prior, double weight, double quad);
CostPtr make_kinked_cost(const Belief& prior, double weight, double quad, double kink);
// Caller-declared cells and kinks; continuity, convexity (including a seeded
// 1e4-triple midpoint probe) and kink declarations are verified, then the cost
// is grounded at the prior.
CostPtr make_custom_pwq_cost(const Belief& prior, std::vector<PwqCell> cells,
                             std::vector<double> declared_kinks);
// Same model under the chart y' = R y + t. Subgradients map by R^-T.
CostPtr rechart_cost(const CostPtr& base, const std::vector<Vec>& R, const Vec& t);

double psi_value(const CostModel& model, const Belief& p);
Polytope psi_subdiff(const CostModel& model, const Vec& ybar);

// integral of psi against pi; +infinity if any support point leaves the domain
double cost_of(const CostModel& model, const PosteriorDistribution& pi);

// c_q(pi) = integral psi d pi - psi(q), the uniformly posterior-separable
// family indexed by prior q. Equals mutual information for the entropy cost.
double uniform_cost(const CostModel& model, const Belief& q, const PosteriorDistribution& pi);

// max over finitely many convex psi_k, grounded by subtracting max_k psi_k(prior).
struct PsiComponent {
  std::string label;
  std::function<double(const Vec& ybar)> value;
  Vec grad_prior;  // one subgradient at the prior, chart coordinates
};

struct FinitePsiModel {
  std::vector<PsiComponent> components;
  Chart chart;
  Belief prior;
  Vec prior_coord;
  double normalizer = 0.0;
};

FinitePsiModel make_finite_psi_model(std::vector<PsiComponent> components, const Belief& prior);
double finite_max_cost(const FinitePsiModel& model, const PosteriorDistribution& pi);

// Raw convex input for canonicalization: a value oracle, its domain, an
// analytic subgradient oracle in full belief coordinates, declared kinks.
struct RawCost {
  std::function<double(const Belief&)> psi;
  std::vector<Halfspace> domain_facets;
  std::function<std::vector<Vec>(const Belief&)> subgrad_full;
  std::vector<Belief> kinks;
  bool kinks_follow_model = false;  // true when the kink list is known complete
  std::string name = "raw";
};

struct CanonicalizeReport {
  std::size_t face_restrictions = 0;
  double subtracted_value = 0.0;
  Vec subtracted_slope;      // chart coordinates of the chosen subgradient
  bool non_unique = false;   // prior subdifferential was a non-singleton
};

// Appendix-style normalization: restrict the domain to the face through the
// prior, subtract the value and a minimal-norm subgradient's affine function.
// Idempotent; the minimal-norm point rule breaks ties deterministically.
CostPtr canonicalize(const RawCost& raw, const Belief& prior, CanonicalizeReport* report = nullptr);

// View an existing model as raw input (used to check idempotence).
RawCost as_raw(const CostPtr& model);

// Uniform lattice in chart coordinates intersected with the domain, plus the
// prior, declared kinks and extra knots. extra_knots are chart points and must
// lie in the domain.
Grid make_grid(const CostModel& model, std::size_t resolution,
               const std::vector<Vec>& extra_knots = {});

// Chart image [lo, hi] of the domain for 1-D models.
void chart_interval(const CostModel& model, double* lo, double* hi);

}  // namespace ricav

#endif
