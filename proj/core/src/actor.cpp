#include "acbandit/actor.hpp"

#include <cmath>

namespace acb {

double constraint_budget(double p0, double alpha) {
  if (!(p0 > 0.0 && p0 < 0.5)) {
    throw config_error("constraint_budget: p0 must lie in (0, 0.5), got " + std::to_string(p0));
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw config_error("constraint_budget: alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  const double log_odds = std::log(p0 / (1.0 - p0));
  return log_odds * log_odds * alpha;
}

Mat empirical_gram(const std::vector<Vec>& policy_features) {
  if (policy_features.empty()) {
    throw data_error("empirical_gram: empty feature list");
  }
  const Index p = policy_features.front().size();
  Mat g = Mat::Zero(p, p);
  for (const Vec& v : policy_features) {
    if (v.size() != p) throw config_error("empirical_gram: ragged feature list");
    g.selfadjointView<Eigen::Lower>().rankUpdate(v, 1.0);
  }
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g / static_cast<double>(policy_features.size());
}

double constraint_value(const Vec& theta, const Mat& gram) {
  if (theta.size() != gram.rows()) {
    throw config_error("constraint_value: dimension mismatch");
  }
  return theta.dot(gram * theta);
}

ActorObjective::ActorObjective(Index p) : p_(p) {
  if (p < 1) throw config_error("ActorObjective: p must be >= 1");
  g_.resize(p_, 64);
  r0_.resize(64);
  dr_.resize(64);
  gram_sum_ = Mat::Zero(p_, p_);
}

void ActorObjective::ensure_capacity(Index want) {
  if (want <= g_.cols()) return;
  Index cap = g_.cols();
  while (cap < want) cap *= 2;
  Mat g2(p_, cap);
  g2.leftCols(n_) = g_.leftCols(n_);
  g_.swap(g2);
  r0_.conservativeResize(cap);
  dr_.conservativeResize(cap);
}

void ActorObjective::add(const Vec& g, double r0, double r1) {
  if (g.size() != p_) throw config_error("ActorObjective::add: feature length mismatch");
  ensure_capacity(n_ + 1);
  g_.col(n_) = g;
  r0_(n_) = r0;
  dr_(n_) = r1 - r0;
  r0_sum_ += r0;
  gram_sum_.selfadjointView<Eigen::Lower>().rankUpdate(g, 1.0);
  gram_sum_.triangularView<Eigen::StrictlyUpper>() = gram_sum_.transpose();
  ++n_;
}

void ActorObjective::set_rewards(Index i, double r0, double r1) {
  r0_sum_ += r0 - r0_(i);
  r0_(i) = r0;
  dr_(i) = r1 - r0;
}

Mat ActorObjective::gram() const { return gram_sum_ / static_cast<double>(n_); }

double ActorObjective::constraint(const Vec& theta) const {
  return theta.dot(gram_sum_ * theta) / static_cast<double>(n_);
}

double ActorObjective::value(const Vec& theta, double lambda) const {
  const double n = static_cast<double>(n_);
  x_.resize(n_);
  x_.matrix().noalias() = g_.leftCols(n_).transpose() * theta;
  e_ = (-x_.abs()).exp();
  pi_ = (x_ >= 0.0).select(1.0 / (1.0 + e_), e_ / (1.0 + e_));
  const double reward = (r0_sum_ + (dr_.head(n_).array() * pi_).sum()) / n;
  const double penalty = lambda * theta.dot(gram_sum_ * theta) / n;
  return reward - penalty;
}

Vec ActorObjective::gradient(const Vec& theta, double lambda) const {
  const double n = static_cast<double>(n_);
  x_.resize(n_);
  x_.matrix().noalias() = g_.leftCols(n_).transpose() * theta;
  e_ = (-x_.abs()).exp();
  pi_ = (x_ >= 0.0).select(1.0 / (1.0 + e_), e_ / (1.0 + e_));
  w_ = pi_ * (1.0 - pi_) * dr_.head(n_).array();
  Vec grad = g_.leftCols(n_) * w_.matrix() / n;
  grad.noalias() -= (2.0 * lambda / n) * (gram_sum_ * theta);
  return grad;
}

Mat ActorObjective::hessian(const Vec& theta, double lambda) const {
  const double n = static_cast<double>(n_);
  x_.resize(n_);
  x_.matrix().noalias() = g_.leftCols(n_).transpose() * theta;
  e_ = (-x_.abs()).exp();
  pi_ = (x_ >= 0.0).select(1.0 / (1.0 + e_), e_ / (1.0 + e_));
  w_ = pi_ * (1.0 - pi_) * (1.0 - 2.0 * pi_) * dr_.head(n_).array() / n;
  Mat h = g_.leftCols(n_) * w_.matrix().asDiagonal() * g_.leftCols(n_).transpose();
  h.noalias() -= (2.0 * lambda / n) * gram_sum_;
  return h;
}

}  // namespace acb
