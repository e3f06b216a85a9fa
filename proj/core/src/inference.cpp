#include "acbandit/inference.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "acbandit/errors.hpp"
#include "acbandit/policy.hpp"

namespace acb {

namespace {

/// Invert a symmetric matrix, rejecting near-singular designs with a
/// message that names the deficient direction.
Mat checked_inverse(const Mat& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  const Vec& evals = es.eigenvalues();
  const double max_abs = evals.cwiseAbs().maxCoeff();
  const double min_abs = evals.cwiseAbs().minCoeff();
  if (max_abs <= 0.0 || min_abs < 1e-12 * max_abs) {
    Index which;
    evals.cwiseAbs().minCoeff(&which);
    std::ostringstream os;
    os << what << ": matrix is singular along direction ["
       << es.eigenvectors().col(which).transpose() << "] (eigenvalue " << evals(which) << ")";
    throw inference_error(os.str());
  }
  return es.eigenvectors() * evals.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

Mat expected_ff(const std::vector<Vec>& contexts, const FeatureMaps& maps, const Vec& theta) {
  if (contexts.empty()) throw data_error("expected_ff: empty context list");
  const Index k = maps.k();
  Mat m = Mat::Zero(k, k);
  for (const Vec& s : contexts) {
    const double pi = action_prob(theta, maps.policy(s));
    const Vec f0 = maps.reward(s, 0);
    const Vec f1 = maps.reward(s, 1);
    m.selfadjointView<Eigen::Lower>().rankUpdate(f0, 1.0 - pi);
    m.selfadjointView<Eigen::Lower>().rankUpdate(f1, pi);
  }
  m.triangularView<Eigen::StrictlyUpper>() = m.transpose();
  return m / static_cast<double>(contexts.size());
}

Vec j_score(const Vec& mu, const Vec& theta, const Vec& g, const Vec& f0, const Vec& f1,
            double lambda) {
  const double pi = action_prob(theta, g);
  const double delta = (f1 - f0).dot(mu);
  return delta * pi * (1.0 - pi) * g - 2.0 * lambda * g * g.dot(theta);
}

JDerivatives j_derivatives(const Vec& mu, const Vec& theta, const std::vector<Vec>& contexts,
                           const FeatureMaps& maps, double lambda) {
  if (contexts.empty()) throw data_error("j_derivatives: empty context list");
  const Index p = maps.p(), k = maps.k();
  JDerivatives d{Mat::Zero(p, p), Mat::Zero(p, k)};
  Mat gram = Mat::Zero(p, p);
  for (const Vec& s : contexts) {
    const Vec g = maps.policy(s);
    const Vec fd = maps.reward_diff(s);
    const double pi = action_prob(theta, g);
    const double w = pi * (1.0 - pi);
    const double delta = fd.dot(mu);
    d.theta_theta.selfadjointView<Eigen::Lower>().rankUpdate(g, delta * w * (1.0 - 2.0 * pi));
    d.theta_mu.noalias() += w * g * fd.transpose();
    gram.selfadjointView<Eigen::Lower>().rankUpdate(g, 1.0);
  }
  const double n = static_cast<double>(contexts.size());
  d.theta_theta.triangularView<Eigen::StrictlyUpper>() = d.theta_theta.transpose();
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  d.theta_theta = d.theta_theta / n - 2.0 * lambda * gram / n;
  d.theta_mu /= n;
  return d;
}

Mat critic_covariance(const std::vector<Vec>& contexts, const FeatureMaps& maps,
                      const Vec& theta_hat, double sigma2) {
  return checked_inverse(expected_ff(contexts, maps, theta_hat), "critic_covariance") * sigma2;
}

Mat actor_covariance(const Vec& mu_hat, const Vec& theta_hat, const std::vector<Vec>& contexts,
                     const FeatureMaps& maps, double lambda, double sigma2) {
  if (contexts.empty()) throw data_error("actor_covariance: empty context list");
  const JDerivatives d = j_derivatives(mu_hat, theta_hat, contexts, maps, lambda);
  const Mat b = checked_inverse(expected_ff(contexts, maps, theta_hat), "actor_covariance");

  const Index p = maps.p();
  Mat score_outer = Mat::Zero(p, p);
  for (const Vec& s : contexts) {
    const Vec j =
        j_score(mu_hat, theta_hat, maps.policy(s), maps.reward(s, 0), maps.reward(s, 1), lambda);
    score_outer.selfadjointView<Eigen::Lower>().rankUpdate(j, 1.0);
  }
  score_outer.triangularView<Eigen::StrictlyUpper>() = score_outer.transpose();
  score_outer /= static_cast<double>(contexts.size());

  const Mat v = sigma2 * d.theta_mu * b * d.theta_mu.transpose() + score_outer;
  const Mat jtt_inv = checked_inverse(d.theta_theta, "actor_covariance[J_theta_theta]");
  Mat cov = jtt_inv * v * jtt_inv;
  cov = 0.5 * (cov + cov.transpose()).eval();  // kill round-off asymmetry
  return cov;
}

double normal_quantile(double prob) {
  boost::math::normal dist;
  return boost::math::quantile(dist, prob);
}

IntervalSet wald_ci(const Vec& theta_hat, const Mat& actor_cov, double t, double level) {
  if (!(t > 0.0)) throw inference_error("wald_ci: t must be positive");
  IntervalSet out;
  out.level = level;
  out.method = CiMethod::wald;
  const double z = normal_quantile(1.0 - (1.0 - level) / 2.0);
  for (Index i = 0; i < theta_hat.size(); ++i) {
    const double sd = std::sqrt(std::max(actor_cov(i, i), 0.0) / t);
    out.bounds.emplace_back(theta_hat(i) - z * sd, theta_hat(i) + z * sd);
  }
  return out;
}

IntervalSet percentile_t_ci(const Vec& theta_hat, const Vec& var_hat,
                            const std::vector<BootstrapPair>& pairs, double T, double level) {
  if (pairs.size() < 2) {
    throw inference_error("percentile_t_ci: need at least 2 bootstrap pairs, got " +
                          std::to_string(pairs.size()));
  }
  IntervalSet out;
  out.level = level;
  out.method = CiMethod::percentile_t;
  const double sqrt_t = std::sqrt(T);
  std::vector<double> pivots(pairs.size());
  for (Index i = 0; i < theta_hat.size(); ++i) {
    for (size_t b = 0; b < pairs.size(); ++b) {
      const double vb = pairs[b].var(i);
      const double num = sqrt_t * (pairs[b].theta(i) - theta_hat(i));
      pivots[b] = vb > 0.0 ? std::abs(num / std::sqrt(vb))
                           : (num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    }
    std::sort(pivots.begin(), pivots.end());
    // nearest-rank (ceil) empirical quantile of |pivot|
    size_t rank = static_cast<size_t>(std::ceil(level * static_cast<double>(pivots.size())));
    rank = std::min(std::max<size_t>(rank, 1), pivots.size());
    const double q = pivots[rank - 1];
    const double half = q * std::sqrt(std::max(var_hat(i), 0.0) / T);
    out.bounds.emplace_back(theta_hat(i) - half, theta_hat(i) + half);
  }
  return out;
}

}  // namespace acb
