#pragma once

#include "acbandit/types.hpp"

namespace acb {

/// Numerically stable logistic function.  Uses 1/(1+e^-x) for x >= 0 and
/// e^x/(1+e^x) otherwise so large |x| never overflows.
double sigmoid(double x);

/// g . theta; throws config_error on dimension mismatch.
double linear_score(const Vec& theta, const Vec& g);

/// pi_theta(s, 1) = sigmoid(g(s) . theta), the probability of action 1.
double action_prob(const Vec& theta, const Vec& g);

/// Draw an action from pi_theta given a uniform u in [0,1).
/// Returns 1 iff u < action_prob(theta, g).
int sample_action(const Vec& theta, const Vec& g, double u);

/// d pi_theta(s,1) / d theta = pi (1 - pi) g.
Vec prob_grad(const Vec& theta, const Vec& g);

}  // namespace acb
