#pragma once

#include <utility>
#include <vector>

#include "acbandit/features.hpp"
#include "acbandit/types.hpp"

namespace acb {

/// Plug-in estimate of E_theta[f f^T]:
/// (1/t) sum_i sum_a f(S_i,a) f(S_i,a)^T pi_theta(S_i,a).
Mat expected_ff(const std::vector<Vec>& contexts, const FeatureMaps& maps, const Vec& theta);

/// Per-context score of the regularized objective,
///   j_theta(mu, theta, s) = Delta_mu(s) pi (1-pi) g - 2 lambda (g g^T) theta
/// with Delta_mu(s) = (f(s,1) - f(s,0)) . mu.
Vec j_score(const Vec& mu, const Vec& theta, const Vec& g, const Vec& f0, const Vec& f1,
            double lambda);

struct JDerivatives {
  Mat theta_theta;  // p x p
  Mat theta_mu;     // p x k
};

/// Empirical averages of the closed-form second derivatives:
///   J_tt = E[Delta_mu pi(1-pi)(1-2pi) g g^T] - 2 lambda Ghat
///   J_tm = E[pi(1-pi) g (f(s,1)-f(s,0))^T]
JDerivatives j_derivatives(const Vec& mu, const Vec& theta, const std::vector<Vec>& contexts,
                           const FeatureMaps& maps, double lambda);

/// [expected_ff]^{-1} sigma2; throws inference_error naming the deficient
/// direction when the design is singular.
Mat critic_covariance(const std::vector<Vec>& contexts, const FeatureMaps& maps,
                      const Vec& theta_hat, double sigma2);

/// Sandwich covariance of sqrt(t)(theta_hat - theta*):
///   J_tt^{-1} V J_tt^{-1},  V = sigma2 J_tm B J_tm^T + E[j j^T],
/// with B = [expected_ff]^{-1} (the appendix proof's form).
Mat actor_covariance(const Vec& mu_hat, const Vec& theta_hat, const std::vector<Vec>& contexts,
                     const FeatureMaps& maps, double lambda, double sigma2);

enum class CiMethod { wald, percentile_t };

struct IntervalSet {
  std::vector<std::pair<double, double>> bounds;  // per coordinate
  double level = 0.95;
  CiMethod method = CiMethod::wald;

  bool contains(Index i, double x) const {
    return bounds[static_cast<size_t>(i)].first <= x && x <= bounds[static_cast<size_t>(i)].second;
  }
};

/// Per-coordinate Wald interval theta_i -+ z sqrt(cov_ii / t).
IntervalSet wald_ci(const Vec& theta_hat, const Mat& actor_cov, double t, double level);

/// One bootstrap rerun's end-of-run estimate and plug-in variance diagonal.
struct BootstrapPair {
  Vec theta;
  Vec var;
};

/// Symmetric percentile-t interval: per coordinate the normal quantile is
/// replaced by the empirical level-quantile of |sqrt(T)(theta_b - theta_hat)/sqrt(var_b)|.
IntervalSet percentile_t_ci(const Vec& theta_hat, const Vec& var_hat,
                            const std::vector<BootstrapPair>& pairs, double T, double level);

/// Upper-tail standard normal quantile helper used by wald_ci.
double normal_quantile(double prob);

}  // namespace acb
