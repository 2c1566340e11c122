#include "ricav/beliefs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ricav/errors.hpp"

namespace ricav {

Belief make_belief(Vec weights) {
  if (weights.size() < 2) {
    throw Error(ErrorCode::BadWeights, "a belief needs at least two states");
  }
  for (double w : weights) {
    if (!std::isfinite(w)) throw Error(ErrorCode::BadWeights, "non-finite weight");
    if (w < -kTolSimplex) {
      std::ostringstream os;
      os << "weight " << w << " is negative";
      throw Error(ErrorCode::NegativeWeight, os.str());
    }
  }
  for (double& w : weights) {
    if (w < 0.0) w = 0.0;
  }
  double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(sum - 1.0) >= kTolSimplex) {
    std::ostringstream os;
    os << "weights sum to " << sum;
    throw Error(ErrorCode::SumNotOne, os.str());
  }
  for (double& w : weights) w /= sum;
  return Belief{std::move(weights)};
}

double max_norm_dist(const Belief& a, const Belief& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Belief barycenter(const std::vector<Belief>& support, const Vec& probs) {
  Vec mean(support.front().size(), 0.0);
  for (std::size_t j = 0; j < support.size(); ++j) {
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += probs[j] * support[j][i];
  }
  // clamp fp dust so the result passes make_belief
  for (double& m : mean) {
    if (m < 0.0 && m > -kTolSimplex) m = 0.0;
  }
  return make_belief(std::move(mean));
}

PosteriorDistribution make_posterior_distribution(std::vector<Belief> support, Vec probs,
                                                  Belief prior) {
  if (support.empty() || support.size() != probs.size()) {
    throw Error(ErrorCode::BadWeights, "support and probs must be nonempty and equal length");
  }
  for (const Belief& p : support) {
    if (p.size() != prior.size()) {
      throw Error(ErrorCode::BadWeights, "support belief has wrong state count");
    }
  }
  double sum = 0.0;
  for (double q : probs) {
    if (!std::isfinite(q) || q <= 0.0) {
      throw Error(ErrorCode::BadWeights, "signal probabilities must be strictly positive");
    }
    sum += q;
  }
  if (std::abs(sum - 1.0) >= kTolSimplex) {
    throw Error(ErrorCode::BadWeights, "signal probabilities must sum to one");
  }
  for (double& q : probs) q /= sum;

  // merge duplicate posteriors, summing their mass
  std::vector<Belief> merged;
  Vec mprobs;
  for (std::size_t j = 0; j < support.size(); ++j) {
    bool found = false;
    for (std::size_t k = 0; k < merged.size(); ++k) {
      if (max_norm_dist(support[j], merged[k]) <= kTolDedup) {
        mprobs[k] += probs[j];
        found = true;
        break;
      }
    }
    if (!found) {
      merged.push_back(std::move(support[j]));
      mprobs.push_back(probs[j]);
    }
  }

  Belief mean = barycenter(merged, mprobs);
  double resid = max_norm_dist(mean, prior);
  if (resid > kTolBarycenter) {
    std::ostringstream os;
    os << "posterior mean misses the prior by " << resid << " (coordinates:";
    for (std::size_t i = 0; i < mean.size(); ++i) os << ' ' << (mean[i] - prior[i]);
    os << ")";
    throw Error(ErrorCode::BarycenterMismatch, os.str());
  }
  return PosteriorDistribution{std::move(merged), std::move(mprobs), std::move(prior)};
}

Vec Chart::apply(const Belief& p) const {
  Vec y(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    double v = b[i];
    for (std::size_t s = 0; s < states; ++s) v += A[i][s] * p[s];
    y[i] = v;
  }
  return y;
}

Belief Chart::invert(const Vec& y) const {
  Vec p(states, 0.0);
  for (std::size_t s = 0; s < states; ++s) {
    double v = d[s];
    for (std::size_t i = 0; i < dim; ++i) v += C[s][i] * y[i];
    p[s] = v;
  }
  return make_belief(std::move(p));
}

Vec Chart::pullback_slope(const Vec& slope) const {
  Vec u(states, 0.0);
  for (std::size_t s = 0; s < states; ++s) {
    for (std::size_t i = 0; i < dim; ++i) u[s] += A[i][s] * slope[i];
  }
  return u;
}

Chart full_simplex_chart(std::size_t states) {
  if (states < 2) throw Error(ErrorCode::BadWeights, "need at least two states");
  Chart ch;
  ch.states = states;
  ch.dim = states - 1;
  ch.A.assign(ch.dim, Vec(states, 0.0));
  ch.b.assign(ch.dim, 0.0);
  for (std::size_t i = 0; i < ch.dim; ++i) ch.A[i][i + 1] = 1.0;
  ch.C.assign(states, Vec(ch.dim, 0.0));
  ch.d.assign(states, 0.0);
  ch.d[0] = 1.0;
  for (std::size_t i = 0; i < ch.dim; ++i) {
    ch.C[0][i] = -1.0;
    ch.C[i + 1][i] = 1.0;
  }
  return ch;
}

namespace {

// Gram-Schmidt over the difference vectors; tolerance guards the affine rank.
std::vector<Vec> orthonormal_span(const std::vector<Belief>& pts) {
  constexpr double kRankTol = 1e-10;
  std::vector<Vec> basis;
  const Belief& o = pts.front();
  for (std::size_t j = 1; j < pts.size(); ++j) {
    Vec v(o.size());
    for (std::size_t s = 0; s < o.size(); ++s) v[s] = pts[j][s] - o[s];
    for (const Vec& e : basis) {
      double dot = 0.0;
      for (std::size_t s = 0; s < v.size(); ++s) dot += v[s] * e[s];
      for (std::size_t s = 0; s < v.size(); ++s) v[s] -= dot * e[s];
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > kRankTol) {
      for (double& x : v) x /= norm;
      basis.push_back(std::move(v));
    }
  }
  return basis;
}

}  // namespace

Chart build_chart(const std::vector<Belief>& spanning_points) {
  if (spanning_points.empty()) throw Error(ErrorCode::EmptyDomain, "no spanning points");
  const std::size_t n = spanning_points.front().size();
  std::vector<Vec> basis = orthonormal_span(spanning_points);
  if (basis.size() == n - 1) return full_simplex_chart(n);

  const Belief& o = spanning_points.front();
  Chart ch;
  ch.states = n;
  ch.dim = basis.size();
  ch.A.assign(ch.dim, Vec(n, 0.0));
  ch.b.assign(ch.dim, 0.0);
  for (std::size_t i = 0; i < ch.dim; ++i) {
    ch.A[i] = basis[i];
    double dot = 0.0;
    for (std::size_t s = 0; s < n; ++s) dot += basis[i][s] * o[s];
    ch.b[i] = -dot;
  }
  ch.C.assign(n, Vec(ch.dim, 0.0));
  ch.d.assign(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    ch.d[s] = o[s];
    for (std::size_t i = 0; i < ch.dim; ++i) ch.C[s][i] = basis[i][s];
  }
  return ch;
}

PosteriorDistribution garble(const PosteriorDistribution& pi,
                             std::vector<std::size_t> merge_indices) {
  std::sort(merge_indices.begin(), merge_indices.end());
  merge_indices.erase(std::unique(merge_indices.begin(), merge_indices.end()),
                      merge_indices.end());
  if (merge_indices.size() < 2) {
    throw Error(ErrorCode::BadIndices, "need at least two distinct support points to merge");
  }
  for (std::size_t idx : merge_indices) {
    if (idx >= pi.support.size()) throw Error(ErrorCode::BadIndices, "index out of range");
  }

  double mass = 0.0;
  Vec pooled(pi.prior.size(), 0.0);
  for (std::size_t idx : merge_indices) {
    mass += pi.probs[idx];
    for (std::size_t s = 0; s < pooled.size(); ++s) pooled[s] += pi.probs[idx] * pi.support[idx][s];
  }
  for (double& x : pooled) x /= mass;
  for (double& x : pooled) {
    if (x < 0.0 && x > -kTolSimplex) x = 0.0;
  }

  std::vector<Belief> support;
  Vec probs;
  for (std::size_t j = 0; j < pi.support.size(); ++j) {
    if (std::binary_search(merge_indices.begin(), merge_indices.end(), j)) continue;
    support.push_back(pi.support[j]);
    probs.push_back(pi.probs[j]);
  }
  support.push_back(make_belief(std::move(pooled)));
  probs.push_back(mass);
  return make_posterior_distribution(std::move(support), std::move(probs), pi.prior);
}

const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::SumNotOne: return "SumNotOne";
    case ErrorCode::BarycenterMismatch: return "BarycenterMismatch";
    case ErrorCode::BadWeights: return "BadWeights";
    case ErrorCode::EmptyDomain: return "EmptyDomain";
    case ErrorCode::BadIndices: return "BadIndices";
    case ErrorCode::ResolutionTooSmall: return "ResolutionTooSmall";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::EmptyMenu: return "EmptyMenu";
    case ErrorCode::BadAct: return "BadAct";
    case ErrorCode::NonConvexSpec: return "NonConvexSpec";
    case ErrorCode::PriorOnDomainBoundary: return "PriorOnDomainBoundary";
    case ErrorCode::PriorMismatch: return "PriorMismatch";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::PriorOutsideDomain: return "PriorOutsideDomain";
    case ErrorCode::NonConvexInput: return "NonConvexInput";
    case ErrorCode::NotTwoStates: return "NotTwoStates";
    case ErrorCode::UnsupportedCostFamily: return "UnsupportedCostFamily";
    case ErrorCode::InfeasibleGrid: return "InfeasibleGrid";
    case ErrorCode::UnboundedObjective: return "UnboundedObjective";
    case ErrorCode::PriorNotInHull: return "PriorNotInHull";
    case ErrorCode::CertificateInvalid: return "CertificateInvalid";
    case ErrorCode::EpsilonSearchFailed: return "EpsilonSearchFailed";
    case ErrorCode::NonUniqueHyperplane: return "NonUniqueHyperplane";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownMenu: return "UnknownMenu";
    case ErrorCode::SolverError: return "SolverError";
  }
  return "Error";
}

}  // namespace ricav
