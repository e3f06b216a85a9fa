#include <doctest.h>

#include <cmath>

#include "acbandit/actor.hpp"
#include "acbandit/policy.hpp"
#include "test_oracles.hpp"

using namespace acb;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Synthetic objective data: contexts [1, s] with s ~ U(-2, 2) and a linear
// treatment contrast.
ActorObjective synthetic_objective(int n, std::uint64_t seed, double effect_scale = 1.0,
                                   double effect_slope = 0.5) {
  Rng rng(seed);
  ActorObjective obj(2);
  for (int i = 0; i < n; ++i) {
    const double s = 4.0 * rng.uniform01() - 2.0;
    const double delta = effect_scale * (0.3 + effect_slope * s);
    obj.add(vec({1.0, s}), 0.0, delta);
  }
  return obj;
}

}  // namespace

TEST_CASE("constraint_budget") {
  // high-precision references for (ln(p0/(1-p0)))^2 alpha
  CHECK(constraint_budget(0.1, 0.1) == doctest::Approx(0.4827795843250328).epsilon(1e-12));
  CHECK(constraint_budget(0.25, 0.5) == doctest::Approx(0.6034744804).epsilon(1e-9));
  CHECK(constraint_budget(0.4999999, 0.3) < 1e-11);  // log-odds of 1/2 vanish
  CHECK_THROWS_AS(constraint_budget(0.5, 0.1), config_error);
  CHECK_THROWS_AS(constraint_budget(0.0, 0.1), config_error);
  CHECK_THROWS_AS(constraint_budget(0.1, 0.0), config_error);
  CHECK_THROWS_AS(constraint_budget(0.1, 1.0), config_error);
}

TEST_CASE("empirical_gram") {
  CHECK(empirical_gram({vec({1, 0})}).isApprox((Mat(2, 2) << 1, 0, 0, 0).finished()));
  CHECK(empirical_gram({vec({1, 0}), vec({0, 1})}).isApprox(0.5 * Mat::Identity(2, 2)));
  CHECK_THROWS_AS(empirical_gram({}), data_error);

  Rng rng(10);
  std::vector<Vec> gs;
  for (int i = 0; i < 10000; ++i) gs.push_back(vec({1.0, rng.gauss()}));
  const Mat g = empirical_gram(gs);
  CHECK((g - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("constraint_value") {
  CHECK(constraint_value(vec({0, 0}), Mat::Identity(2, 2)) == 0.0);
  CHECK(constraint_value(vec({0.3, 0.4}), Mat::Identity(2, 2)) ==
        doctest::Approx(0.25).epsilon(1e-15));
  // the reported optimum nearly exhausts the budget under the identity Gram
  const Vec th = vec({0.417778, 0.394811, 0.389474, 0.001068});
  CHECK(constraint_value(th, Mat::Identity(4, 4)) ==
        doctest::Approx(th.squaredNorm()).epsilon(1e-15));
  CHECK(std::abs(th.squaredNorm() - constraint_budget(0.1, 0.1)) < 0.01);
}

TEST_CASE("objective value semantics") {
  ActorObjective obj(2);
  obj.add(vec({1.0, 0.5}), 1.0, 3.0);
  obj.add(vec({1.0, -1.0}), -2.0, 0.0);
  const Vec zero = vec({0, 0});
  // pi = 1/2 for both actions: mean over a of the estimates, no penalty
  CHECK(obj.value(zero, 5.0) == doctest::Approx(0.5 * (0.5 * (1 + 3) + 0.5 * (-2 + 0))));
  // lambda scaling only enters through the quadratic term
  const Vec th = vec({0.4, -0.2});
  CHECK(obj.value(th, 2.0) - obj.value(th, 0.0) ==
        doctest::Approx(-2.0 * obj.constraint(th)).epsilon(1e-12));
  CHECK(obj.value(zero, 2.0) == obj.value(zero, 7.0));  // objective(0) invariant to lambda
}

TEST_CASE("objective gradient and hessian match finite differences") {
  ActorObjective obj = synthetic_objective(50, 77);
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const Vec th = testing::random_vec(rng, 2, -2, 2);
    const double lam = rng.uniform01();
    const Vec fd = testing::central_diff([&](const Vec& t) { return obj.value(t, lam); }, th);
    const Vec an = obj.gradient(th, lam);
    CHECK((fd - an).norm() < 1e-6 * std::max(1.0, an.norm()));
    const Mat hfd = testing::central_diff_jacobian(
        [&](const Vec& t) { return obj.gradient(t, lam); }, th, 2);
    CHECK((hfd - obj.hessian(th, lam)).norm() < 1e-5 * std::max(1.0, obj.hessian(th, lam).norm()));
  }
}

TEST_CASE("maximize: zero treatment effect yields the random policy") {
  ActorObjective obj = synthetic_objective(200, 3, 0.0);  // delta == 0 everywhere
  const SearchOptions opt;
  const MaximizeResult res = maximize_over(obj, 2, 0.05, opt);
  CHECK(res.theta.lpNorm<Eigen::Infinity>() < 1e-3);
  CHECK(res.converged);

  // with lambda = 0 the objective is flat; the tie-break picks the smallest norm
  const MaximizeResult flat = maximize_over(obj, 2, 0.0, opt);
  CHECK(flat.theta.isZero());
}

TEST_CASE("maximize: huge lambda forces theta to zero") {
  ActorObjective obj = synthetic_objective(200, 4);
  const MaximizeResult res = maximize_over(obj, 2, 1e6, SearchOptions{});
  CHECK(res.theta.lpNorm<Eigen::Infinity>() < 1e-3);
}

TEST_CASE("maximize dominates every probe and satisfies stationarity") {
  ActorObjective obj = synthetic_objective(300, 9);
  const MaximizeResult res = maximize_over(obj, 2, 0.05, SearchOptions{});
  CHECK(res.converged);
  CHECK(res.grad_inf_norm <= 1e-3);
  // spot-check dominance against a fresh probe cloud
  Rng rng(31);
  for (int i = 0; i < 500; ++i) {
    const Vec th = testing::random_vec(rng, 2, -2, 2);
    CHECK(res.value >= obj.value(th, 0.05) - 1e-9);
  }
}

TEST_CASE("unpenalized discrete-context policies saturate") {
  // two contexts with opposite treatment effects; without the quadratic
  // penalty the optimum is deterministic, so the box bound caps the norm
  // and widening it grows the solution while the probabilities head to {0,1}
  ActorObjective obj(2);
  for (int i = 0; i < 50; ++i) {
    obj.add(vec({1.0, 1.0}), 0.0, 1.0);
    obj.add(vec({1.0, 2.0}), 0.0, -1.0);
  }
  SearchOptions grid_only;  // isolate the box-bound effect
  grid_only.max_evals = 0;
  grid_only.polish = false;
  SearchOptions wide_grid = grid_only;
  wide_grid.grid_lo = -8.0;
  wide_grid.grid_hi = 8.0;
  const MaximizeResult a = maximize_over(obj, 2, 0.0, grid_only);
  const MaximizeResult b = maximize_over(obj, 2, 0.0, wide_grid);
  CHECK(b.theta.norm() > a.theta.norm());
  CHECK(b.value >= a.value);

  // unconstrained pattern refinement drives the probabilities to the edge
  SearchOptions full;
  full.grid_lo = -8.0;
  full.grid_hi = 8.0;
  full.polish = false;
  const MaximizeResult c = maximize_over(obj, 2, 0.0, full);
  CHECK(c.theta.norm() > b.theta.norm());
  CHECK(action_prob(c.theta, vec({1.0, 1.0})) > 0.97);
  CHECK(action_prob(c.theta, vec({1.0, 2.0})) < 0.03);
}

TEST_CASE("lambda_search basics") {
  ActorObjective obj = synthetic_objective(400, 12);
  LambdaOptions lo;

  SUBCASE("vacuous budget returns the lattice minimum") {
    const LambdaSearchResult res = lambda_search(obj, 2, 1e18, lo);
    CHECK(res.feasible);
    CHECK(res.lambda == doctest::Approx(1.0 / 1024.0));
  }
  SUBCASE("zero treatment effect is feasible at the lattice minimum") {
    ActorObjective flat = synthetic_objective(100, 13, 0.0);
    const LambdaSearchResult res = lambda_search(flat, 2, constraint_budget(0.1, 0.1), lo);
    CHECK(res.feasible);
    CHECK(res.lambda == doctest::Approx(1.0 / 1024.0));
    CHECK(res.actor.theta.lpNorm<Eigen::Infinity>() < 1e-3);
  }
  SUBCASE("unsatisfiable budget reports infeasibility carrying lambda_max") {
    const LambdaSearchResult res = lambda_search(obj, 2, -1.0, lo);
    CHECK_FALSE(res.feasible);
    CHECK(res.lambda == doctest::Approx(4.0));
  }
  SUBCASE("returned point satisfies the constraint") {
    const double budget = 0.05;
    const LambdaSearchResult res = lambda_search(obj, 2, budget, lo);
    CHECK(res.feasible);
    CHECK(res.constraint <= budget + 1e-6);
    CHECK(obj.constraint(res.actor.theta) <= budget + 1e-6);
  }
}

TEST_CASE("constraint value is monotone in lambda") {
  ActorObjective obj = synthetic_objective(500, 21, 2.0);
  double prev = std::numeric_limits<double>::infinity();
  for (double lam : {0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0}) {
    const MaximizeResult res = maximize_over(obj, 2, lam, SearchOptions{});
    const double q = obj.constraint(res.theta);
    CHECK(q <= prev + 1e-6);
    prev = q;
    // objective strictly decreases in lambda away from zero
    if (res.theta.norm() > 1e-6) {
      CHECK(obj.value(res.theta, lam + 0.1) < obj.value(res.theta, lam));
    }
  }
}

TEST_CASE("necessary bound theta' G theta <= 2 / lambda under clipped estimates") {
  // per-action estimates bounded by K+1 = 2 imply the Lemma-2 bound
  Rng rng(14);
  ActorObjective obj(2);
  for (int i = 0; i < 300; ++i) {
    const double s = rng.gauss();
    const double r0 = std::clamp(3.0 * rng.gauss(), -2.0, 2.0);
    const double r1 = std::clamp(3.0 * rng.gauss(), -2.0, 2.0);
    obj.add(vec({1.0, s}), r0, r1);
  }
  for (double lam : {0.01, 0.05, 0.25, 1.0}) {
    const MaximizeResult res = maximize_over(obj, 2, lam, SearchOptions{});
    CHECK(obj.constraint(res.theta) <= 2.0 / lam + 1e-6);
  }
}

TEST_CASE("warm starts join the seed set") {
  ActorObjective obj = synthetic_objective(300, 25);
  SearchOptions no_grid;
  no_grid.use_grid = false;
  no_grid.warm_starts.push_back(vec({0.35, 0.2}));
  const MaximizeResult warm = maximize_over(obj, 2, 0.05, no_grid);
  const MaximizeResult full = maximize_over(obj, 2, 0.05, SearchOptions{});
  CHECK((warm.theta - full.theta).lpNorm<Eigen::Infinity>() < 5e-3);
}
