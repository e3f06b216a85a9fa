#include <doctest.h>

#include <cmath>

#include "acbandit/errors.hpp"
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
}  // namespace

TEST_CASE("linear_score") {
  CHECK(linear_score(vec({0, 0, 0, 0}), vec({1.3, -2, 0.5, 9})) == 0.0);
  CHECK(linear_score(vec({1, 1}), vec({1, -1})) == 0.0);
  CHECK(linear_score(vec({0.417778, 0.394811, 0.389474, 0.001068}), vec({1, 0, 0, 0})) ==
        doctest::Approx(0.417778).epsilon(1e-12));
  CHECK_THROWS_AS(linear_score(vec({1, 2}), vec({1, 2, 3})), config_error);
}

TEST_CASE("action_prob values and stability") {
  CHECK(action_prob(vec({0, 0}), vec({3, -4})) == 0.5);
  CHECK(action_prob(vec({std::log(9.0)}), vec({1})) == doctest::Approx(0.9).epsilon(1e-12));
  // logistic at the reported unit-context score, high-precision reference
  CHECK(action_prob(vec({0.417778, 0.394811, 0.389474, 0.001068}), vec({1, 0, 0, 0})) ==
        doctest::Approx(0.602951422711).epsilon(1e-9));
  // no overflow far outside the usual range
  CHECK(action_prob(vec({5000.0}), vec({1})) == 1.0);
  CHECK(action_prob(vec({-5000.0}), vec({1})) == 0.0);
  CHECK(std::isfinite(action_prob(vec({800.0}), vec({1}))));
}

TEST_CASE("action_prob open-interval and sign symmetry") {
  Rng rng(99);
  for (int i = 0; i < 1000; ++i) {
    Vec theta = testing::random_vec(rng, 4, -5, 5);
    const Vec g = testing::random_vec(rng, 4, -5, 5);
    // keep the score below the double-precision saturation point (~36.7)
    // so the open-interval property is representable
    const double score = theta.dot(g);
    if (std::abs(score) > 30.0) theta *= 30.0 / std::abs(score);
    const double pi = action_prob(theta, g);
    CHECK(pi > 0.0);
    CHECK(pi < 1.0);
    CHECK(action_prob(-theta, g) == doctest::Approx(1.0 - pi).epsilon(1e-14));
  }
  // beyond saturation the result stays finite and inside [0, 1]
  for (double s : {50.0, 500.0, 5000.0, -5000.0}) {
    const double pi = action_prob((Vec(1) << s).finished(), (Vec(1) << 1.0).finished());
    CHECK(std::isfinite(pi));
    CHECK(pi >= 0.0);
    CHECK(pi <= 1.0);
  }
}

TEST_CASE("sample_action thresholding") {
  CHECK(sample_action(vec({0, 0}), vec({1, 1}), 0.49) == 1);
  CHECK(sample_action(vec({0, 0}), vec({1, 1}), 0.50) == 0);
  CHECK(sample_action(vec({100.0}), vec({7}), 0.999999) == 1);  // saturated policy
}

TEST_CASE("sample_action empirical frequency matches action_prob") {
  Rng rng(2024);
  for (double score : {-1.2, 0.3, 1.7}) {
    const Vec theta = vec({score});
    const Vec g = vec({1});
    const double pi = action_prob(theta, g);
    const int n = 100000;
    int ones = 0;
    for (int i = 0; i < n; ++i) ones += sample_action(theta, g, rng.uniform01());
    const double se = std::sqrt(pi * (1 - pi) / n);
    CHECK(std::abs(static_cast<double>(ones) / n - pi) < 3.0 * se);
  }
}

TEST_CASE("prob_grad closed form") {
  const Vec g = vec({1, 0});
  const Vec grad = prob_grad(vec({0, 0}), g);
  CHECK(grad(0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(grad(1) == 0.0);
  // saturation kills the gradient
  CHECK(prob_grad(vec({50, 0}), vec({1, 1})).norm() < 1e-15);
}

TEST_CASE("prob_grad agrees with central finite differences") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const Vec theta = testing::random_vec(rng, 3, -5, 5);
    const Vec g = testing::random_vec(rng, 3, -5, 5);
    const Vec analytic = prob_grad(theta, g);
    const Vec fd = testing::central_diff([&](const Vec& th) { return action_prob(th, g); }, theta);
    const double tol = 1e-6 * std::max(1.0, analytic.norm());
    CHECK((analytic - fd).norm() < tol);
  }
}
