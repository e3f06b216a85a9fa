#include "acbandit/policy.hpp"

#include <cmath>

#include "acbandit/errors.hpp"

namespace acb {

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double linear_score(const Vec& theta, const Vec& g) {
  if (theta.size() != g.size()) {
    throw config_error("linear_score: policy parameter has length " +
                       std::to_string(theta.size()) + " but feature has length " +
                       std::to_string(g.size()));
  }
  return theta.dot(g);
}

double action_prob(const Vec& theta, const Vec& g) { return sigmoid(linear_score(theta, g)); }

int sample_action(const Vec& theta, const Vec& g, double u) {
  return u < action_prob(theta, g) ? 1 : 0;
}

Vec prob_grad(const Vec& theta, const Vec& g) {
  const double pi = action_prob(theta, g);
  return pi * (1.0 - pi) * g;
}

}  // namespace acb
