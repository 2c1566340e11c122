#include <doctest.h>

#include <cmath>
#include <functional>

#include "ricav/beliefs.hpp"
#include "ricav/errors.hpp"
#include "ricav/rng.hpp"

using namespace ricav;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a ricav::Error");
  return ErrorCode::SolverError;
}

Belief random_belief(Rng& rng, std::size_t n) {
  Vec w(n);
  double sum = 0.0;
  for (double& x : w) {
    x = -std::log(rng.u01() + 1e-300);
    sum += x;
  }
  for (double& x : w) x /= sum;
  return make_belief(std::move(w));
}

}  // namespace

TEST_SUITE("beliefs") {

TEST_CASE("belief construction validates weights") {
  Belief p = make_belief({0.25, 0.75});
  CHECK(p.size() == 2);
  CHECK(p[0] == doctest::Approx(0.25));
  CHECK(code_of([] { make_belief({-0.1, 1.1}); }) == ErrorCode::NegativeWeight);
  CHECK(code_of([] { make_belief({0.6, 0.6}); }) == ErrorCode::SumNotOne);
  CHECK(code_of([] { make_belief({1.0}); }) == ErrorCode::BadWeights);

  Belief clamped = make_belief({-1e-13, 1.0 + 1e-13});
  CHECK(clamped[0] == 0.0);
  CHECK(clamped[1] == 1.0);
}

TEST_CASE("max_norm_dist") {
  Belief a = make_belief({0.2, 0.8});
  Belief b = make_belief({0.5, 0.5});
  CHECK(max_norm_dist(a, b) == doctest::Approx(0.3));
  CHECK(max_norm_dist(a, a) == 0.0);
}

TEST_CASE("posterior distributions enforce the mean constraint") {
  Belief prior = make_belief({0.5, 0.5});
  auto pi = make_posterior_distribution({make_belief({1.0, 0.0}), make_belief({0.0, 1.0})},
                                        {0.5, 0.5}, prior);
  CHECK(pi.support.size() == 2);

  CHECK(code_of([&] {
          make_posterior_distribution({make_belief({1.0, 0.0}), make_belief({0.0, 1.0})},
                                      {0.7, 0.3}, prior);
        }) == ErrorCode::BarycenterMismatch);
  CHECK(code_of([&] {
          make_posterior_distribution({make_belief({1.0, 0.0})}, {0.5, 0.5}, prior);
        }) == ErrorCode::BadWeights);
  CHECK(code_of([&] {
          make_posterior_distribution({make_belief({1.0, 0.0}), make_belief({0.0, 1.0})},
                                      {1.0, -0.0}, prior);
        }) == ErrorCode::BadWeights);
}

TEST_CASE("duplicate posteriors merge and pool their mass") {
  Belief prior = make_belief({0.5, 0.5});
  auto pi = make_posterior_distribution(
      {make_belief({0.9, 0.1}), make_belief({0.9, 0.1}), make_belief({0.1, 0.9})},
      {0.25, 0.25, 0.5}, prior);
  CHECK(pi.support.size() == 2);
  CHECK(pi.probs[0] == doctest::Approx(0.5));
}

TEST_CASE("barycenter") {
  Belief c = barycenter({make_belief({1.0, 0.0}), make_belief({0.0, 1.0})}, {0.25, 0.75});
  CHECK(c[0] == doctest::Approx(0.25));
  CHECK(c[1] == doctest::Approx(0.75));
}

TEST_CASE("drop-first chart round trips and pulls back expectations") {
  Rng rng(7);
  for (std::size_t n : {2, 3, 5}) {
    Chart ch = full_simplex_chart(n);
    CHECK(ch.dim == n - 1);
    for (int t = 0; t < 50; ++t) {
      Belief p = random_belief(rng, n);
      Vec y = ch.apply(p);
      for (std::size_t i = 0; i < ch.dim; ++i) CHECK(y[i] == doctest::Approx(p[i + 1]));
      Belief back = ch.invert(y);
      CHECK(max_norm_dist(p, back) < 1e-12);

      // an act built from a chart slope matches it up to a p-independent constant
      Vec slope(ch.dim);
      for (double& x : slope) x = rng.uniform(-3.0, 3.0);
      Vec u = ch.pullback_slope(slope);
      auto offset_at = [&](const Belief& q) {
        Vec yq = ch.apply(q);
        double chart_part = 0.0;
        for (std::size_t i = 0; i < ch.dim; ++i) chart_part += slope[i] * yq[i];
        double act_part = 0.0;
        for (std::size_t s = 0; s < n; ++s) act_part += u[s] * q[s];
        return act_part - chart_part;
      };
      CHECK(offset_at(p) ==
            doctest::Approx(offset_at(random_belief(rng, n))).scale(1).epsilon(1e-12));
    }
  }
}

TEST_CASE("build_chart reduces to an affine-rank chart on degenerate point sets") {
  // two collinear 3-state points: rank-one chart
  Chart ch = build_chart({make_belief({0.2, 0.4, 0.4}), make_belief({0.4, 0.3, 0.3})});
  CHECK(ch.dim == 1);
  Belief mid = make_belief({0.3, 0.35, 0.35});
  Vec y = ch.apply(mid);
  CHECK(max_norm_dist(ch.invert(y), mid) < 1e-10);

  // spanning points: the full chart comes back
  Chart full = build_chart(
      {make_belief({1.0, 0.0, 0.0}), make_belief({0.0, 1.0, 0.0}), make_belief({0.0, 0.0, 1.0})});
  CHECK(full.dim == 2);
}

TEST_CASE("garble replaces merged points by their barycenter") {
  Belief prior = make_belief({0.5, 0.5});
  auto pi = make_posterior_distribution(
      {make_belief({1.0, 0.0}), make_belief({0.5, 0.5}), make_belief({0.0, 1.0})},
      {0.25, 0.5, 0.25}, prior);
  // pooled point is the even vertex mix (1/2, 1/2), which then merges with
  // the existing middle point, collapsing the distribution to the prior
  auto g = garble(pi, {0, 2});
  CHECK(g.support.size() == 1);
  CHECK(max_norm_dist(g.support[0], prior) < 1e-12);
  CHECK(g.probs[0] == doctest::Approx(1.0));

  auto part = garble(pi, {1, 2});
  CHECK(part.support.size() == 2);
  CHECK(max_norm_dist(barycenter(part.support, part.probs), prior) < 1e-12);
  bool found = false;
  for (const Belief& q : part.support) {
    if (max_norm_dist(q, make_belief({1.0 / 3.0, 2.0 / 3.0})) < 1e-12) found = true;
  }
  CHECK(found);
  CHECK(code_of([&] { garble(pi, {1}); }) == ErrorCode::BadIndices);
  CHECK(code_of([&] { garble(pi, {0, 9}); }) == ErrorCode::BadIndices);
}

TEST_CASE("rng is deterministic per seed") {
  Rng a(42), b(42), c(43);
  CHECK(a.next() == b.next());
  CHECK(a.next() == b.next());
  CHECK(a.next() != c.next());
  Rng d(1);
  for (int i = 0; i < 1000; ++i) {
    double u = d.u01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

}  // TEST_SUITE
