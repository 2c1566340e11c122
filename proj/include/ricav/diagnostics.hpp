#ifndef RICAV_DIAGNOSTICS_HPP
#define RICAV_DIAGNOSTICS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ricav/costs.hpp"
#include "ricav/menus.hpp"
#include "ricav/solver.hpp"

namespace ricav {

// Orthogonality cut applied to the shared direction delta. Shifted (default)
// requires delta . (ybar_i - prior) = 0; Absolute requires delta . ybar_i = 0.
enum class OrthConvention { Shifted, Absolute };

// Default seed for the random probe directions of the certificate search.
inline constexpr uint64_t kProbeSeed = 0xd15c0de5u;

// Witness that psibar admits two subgradient selections differing by one
// nonzero delta at every listed point, with the prior inside the points' hull.
// Residuals are recorded so a deserialized certificate can be re-verified.
struct NdisdCertificate {
  std::vector<Belief> points;
  std::vector<Vec> coords;         // chart images of points
  std::vector<Vec> lambdas;        // lambdas[i] in subdiff(psibar)(coords[i])
  Vec delta;                       // lambdas[i] + delta also in subdiff there
  Vec hull_weights;                // convex weights writing the prior over points
  double subgrad_residual = 0.0;   // worst sampled subgradient-inequality slack
  double orth_residual = 0.0;      // worst orthogonality violation over points
  double hull_residual = 0.0;      // |sum w_i coords[i] - prior|_inf
};

// Feasibility search for a joint non-differentiability direction at the given
// points. Probes 2*dim signed axis directions plus 8 seeded random ones; the
// largest direction found wins. nullopt means no direction above 1e-8 was
// found, which is conclusive only when the subdifferential vertex lists are.
std::optional<NdisdCertificate> ndisd_probe(const CostModel& model,
                                            const std::vector<Belief>& points,
                                            OrthConvention conv = OrthConvention::Shifted,
                                            uint64_t seed = kProbeSeed);

// All directions jointly available at the given points: the intersection over
// i of (subdiff_i - subdiff_i) with the orthogonality cut. Exact in one chart
// dimension and whenever every subdifferential is a singleton; otherwise the
// hull of probe optima, which always contains 0.
Polytope d_set(const CostModel& model, const std::vector<Belief>& points,
               OrthConvention conv = OrthConvention::Shifted);

// Joint-directional differentiability scan. Candidate sets: the prior alone,
// each declared kink paired with its reflection through the prior, then any
// caller-supplied sets. A clean scan is conclusive only when the model
// declares its kink registry exhaustive.
struct JddReport {
  enum class Verdict { Satisfied, Violated };
  Verdict verdict = Verdict::Satisfied;
  bool conclusive = false;
  std::optional<NdisdCertificate> certificate;
  std::vector<std::vector<Belief>> cleared;
  std::vector<std::vector<Belief>> skipped;  // hull precondition failed
};

JddReport jdd_check(const CostModel& model,
                    const std::vector<std::vector<Belief>>& candidate_sets = {},
                    OrthConvention conv = OrthConvention::Shifted,
                    uint64_t seed = kProbeSeed);

// Menu of one tangent act per certificate point. Its value is zero, the zero
// slope supports it, and -delta supports it too when delta satisfies the
// orthogonality cut (neg_delta_checked records whether that test applied).
struct HMenuResult {
  Menu menu;
  double value = 0.0;
  bool zero_supported = false;
  bool neg_delta_supported = false;
  bool neg_delta_checked = false;
  double orth_residual = 0.0;
};

HMenuResult build_menu_h(const CostModel& model, const NdisdCertificate& cert,
                         std::size_t resolution = 257);

struct AxiomReport {
  enum class Verdict { Satisfied, Violated, PremiseFails };
  Verdict verdict = Verdict::Satisfied;
  std::vector<std::pair<std::string, double>> premise_values;
  bool premise_holds = false;
  double premise_residual = 0.0;
  double conclusion_value = 0.0;
  double margin = 0.0;            // conclusion deviation; positive = violation size
  std::optional<UtilityAct> witness;
  std::string note;
};

// Two-act extension of the certificate's tangent menu that leaves each
// one-sided value unchanged but lifts the value of the union.
struct CounterexampleReport {
  NdisdCertificate certificate;
  Vec epsilon;
  Menu h, f, g;
  double value_h = 0.0;
  double value_f = 0.0;
  double value_g = 0.0;
  double value_intersection = 0.0;
  double value_union = 0.0;
  double predicted_lower_bound = 0.0;  // half of delta . epsilon
  AxiomReport axiom;
};

CounterexampleReport build_iia_counterexample(const CostModel& model,
                                              const NdisdCertificate& cert,
                                              std::size_t resolution = 257);

// The affine act h with h ~ F ~ F + {h}: slope is an admissible menu slope
// plus the minimal-norm subgradient at the prior, level is the menu value at
// the prior. Requires a certified-narrow slope set unless an explicit slope
// choice overrides. Both equivalences are re-verified before returning.
UtilityAct ignorance_equivalent(const CostModel& model, const Menu& menu,
                                const SolveReport& solve, const HyperplaneSet& lam,
                                const Grid& grid,
                                const std::optional<Vec>& lambda_override = std::nullopt);

AxiomReport check_iia(const CostModel& model, const Menu& f, const Menu& g, const Grid& grid);
AxiomReport check_ie(const CostModel& model, const Menu& menu, const Grid& grid);

// Max-of-finitely-many-costs variant, evaluated exactly by enumerating the
// component costs inside the value program; candidate acts are tangent to the
// components at the prior. One chart dimension only.
AxiomReport check_ie(const FinitePsiModel& model, const Menu& menu,
                     std::size_t resolution = 257);

// Cost surface rebuilt from irrelevant acts alone: tangent acts are collected
// at every grid point, each is confirmed irrelevant, and the recovered value
// is their upper envelope (floored at zero by the zero act).
struct RecoveredPsi {
  std::vector<Belief> points;
  std::vector<double> recovered;
  std::vector<double> actual;
  double max_error = 0.0;
  Menu tangents;
  bool all_irrelevant = false;
};

RecoveredPsi recover_psi(const CostModel& model, const Grid& grid);

// True when adding h to the zero-act menu leaves its value at zero.
bool is_irrelevant(const CostModel& model, const UtilityAct& h, const Grid& grid);

}  // namespace ricav

#endif
