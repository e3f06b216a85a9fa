#include "acbandit/critic.hpp"

#include <algorithm>
#include <cmath>

#include "acbandit/errors.hpp"

namespace acb {

namespace {
constexpr int kRefactorEvery = 256;
}

double clip_reward(double raw, double K) {
  if (!(K > 0.0)) {
    throw config_error("clip_reward: bound K must be positive, got " + std::to_string(K));
  }
  return std::clamp(raw, -(K + 1.0), K + 1.0);
}

Critic::Critic(Index k, double zeta) : zeta_(zeta) {
  if (k < 1) {
    throw config_error("Critic: feature dimension must be >= 1, got " + std::to_string(k));
  }
  if (!(zeta > 0.0)) {
    throw config_error("Critic: ridge weight zeta must be positive, got " + std::to_string(zeta));
  }
  b_ = Mat::Identity(k, k) * zeta;
  a_ = Vec::Zero(k);
  mu_ = Vec::Zero(k);
  llt_.compute(b_);
}

void Critic::update(const Vec& f, double reward) {
  if (f.size() != b_.rows()) {
    throw config_error("Critic::update: feature length " + std::to_string(f.size()) +
                       " does not match critic dimension " + std::to_string(b_.rows()));
  }
  if (!f.allFinite() || !std::isfinite(reward)) {
    throw data_error("Critic::update: non-finite feature or reward rejected");
  }
  b_.selfadjointView<Eigen::Lower>().rankUpdate(f, 1.0);
  b_.triangularView<Eigen::StrictlyUpper>() = b_.transpose();
  a_ += f * reward;
  ++n_;
  if (++updates_since_refactor_ >= kRefactorEvery) {
    llt_.compute(b_);
    updates_since_refactor_ = 0;
  } else {
    llt_.rankUpdate(f, 1.0);
  }
  mu_ = llt_.solve(a_);
}

double Critic::predict(const Vec& f) const {
  if (f.size() != mu_.size()) {
    throw config_error("Critic::predict: feature length mismatch");
  }
  return f.dot(mu_);
}

double Critic::predict_clipped(const Vec& f, double K) const {
  return clip_reward(predict(f), K);
}

std::vector<double> residuals(const Critic& critic, const std::vector<DecisionRecord>& history,
                              const FeatureMaps& maps) {
  std::vector<double> out;
  out.reserve(history.size());
  for (const auto& rec : history) {
    out.push_back(rec.reward - critic.predict(maps.reward(rec.context, rec.action)));
  }
  return out;
}

double sigma2_hat(const std::vector<double>& resid, Index k) {
  const Index t = static_cast<Index>(resid.size());
  if (t <= k) {
    throw inference_error("sigma2_hat: need more observations (" + std::to_string(t) +
                          ") than features (" + std::to_string(k) + ")");
  }
  double ss = 0.0;
  for (double e : resid) ss += e * e;
  return ss / static_cast<double>(t - k);
}

}  // namespace acb
