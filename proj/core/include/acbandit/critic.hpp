#pragma once

#include <vector>

#include "acbandit/features.hpp"
#include "acbandit/types.hpp"

namespace acb {

/// One (context, action, reward) observation of a trajectory.
struct DecisionRecord {
  Vec context;
  int action = 0;    // binary
  double reward = 0;  // in the sign the learner maximizes
};

/// Clamp a raw reward prediction to [-(K+1), K+1].
double clip_reward(double raw, double K);

// Incremental ridge regression for the linear reward model
//   mu_hat = (zeta I + sum f f^T)^{-1} sum f R.
// A Cholesky factor of the Gram matrix is rank-one updated per observation
// and rebuilt from scratch every 256 updates; the result is contractually
// equal to a fresh dense solve on the accumulated history within 1e-8.
class Critic {
 public:
  Critic(Index k, double zeta);

  /// Absorb one observation; rejects non-finite inputs without mutating state.
  void update(const Vec& f, double reward);

  /// Raw estimate f . mu_hat.
  double predict(const Vec& f) const;

  /// Estimate clamped to [-(K+1), K+1].
  double predict_clipped(const Vec& f, double K) const;

  const Vec& mu_hat() const { return mu_; }
  const Mat& gram() const { return b_; }     // B = zeta I + sum f f^T
  const Vec& moment() const { return a_; }   // A = sum f R
  Index dim() const { return b_.rows(); }
  Index n_obs() const { return n_; }
  double zeta() const { return zeta_; }

 private:
  Mat b_;
  Vec a_;
  Vec mu_;
  Eigen::LLT<Mat> llt_;
  Index n_ = 0;
  int updates_since_refactor_ = 0;
  double zeta_ = 1.0;
};

/// In-order residuals e_t = R_t - f(S_t, A_t) . mu_hat for a fitted critic.
std::vector<double> residuals(const Critic& critic, const std::vector<DecisionRecord>& history,
                              const FeatureMaps& maps);

/// Error-variance estimate sum e^2 / (t - k) with a degrees-of-freedom
/// correction; requires t > k.
double sigma2_hat(const std::vector<double>& resid, Index k);

}  // namespace acb
