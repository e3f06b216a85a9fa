#include "acbandit/harness.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "acbandit/policy.hpp"

namespace acb {

void RunConfig::validate() const {
  if (burn_in < 0) throw config_error("run.burn_in must be >= 0");
  if (T < burn_in || T < 1) throw config_error("run.T must be >= run.burn_in and >= 1");
  if (!(p0 > 0.0 && p0 < 0.5)) throw config_error("constraint.p0 must lie in (0, 0.5)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw config_error("constraint.alpha must lie in (0, 1)");
  if (lambda_mode == LambdaMode::fixed && !(lambda_fixed >= 0.0)) {
    throw config_error("constraint.lambda must be >= 0");
  }
  if (!(zeta > 0.0)) throw config_error("run.zeta must be positive");
  if (clip && !(clip_bound > 0.0)) throw config_error("run.clip_bound must be positive");
  if (replicate_count < 1) throw config_error("run.replicates must be >= 1");
  if (bootstrap_B < 0) throw config_error("inference.bootstrap_B must be >= 0");
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw config_error("inference.level must lie in (0, 1)");
  if (workers < 1) throw config_error("workers must be >= 1");
}

namespace {

// Where each run draws its context/reward from: the generative environment
// for real runs, the recorded context history plus synthetic rewards for
// bootstrap reruns.
struct StepSource {
  virtual ~StepSource() = default;
  virtual Vec next_context(const EnvState& state, Rng& rng) = 0;
  // Returns the outcome in the environment's native sign.
  virtual double outcome(const Vec& s, int action, Rng& rng) = 0;
};

struct EnvSource final : StepSource {
  const EnvSpec& spec;
  explicit EnvSource(const EnvSpec& s) : spec(s) {}
  Vec next_context(const EnvState& state, Rng& rng) override {
    return env_next_context(spec, state, rng);
  }
  double outcome(const Vec& s, int action, Rng& rng) override {
    return env_outcome(spec, s, action, rng);
  }
};

struct BootstrapSource final : StepSource {
  const std::vector<Vec>& contexts;
  const Vec& mu;
  const std::vector<double>& pool;
  const FeatureMaps maps;
  const bool negate;  // pool/mu live in reward sign; undo for native-sign output
  int t = 0;
  BootstrapSource(const std::vector<Vec>& c, const Vec& m, const std::vector<double>& p,
                  FeatureMaps fm, bool neg)
      : contexts(c), mu(m), pool(p), maps(fm), negate(neg) {}
  Vec next_context(const EnvState&, Rng&) override { return contexts[static_cast<size_t>(t++)]; }
  double outcome(const Vec& s, int action, Rng& rng) override {
    const double eps = pool.empty() ? 0.0 : pool[rng.uniform_below(pool.size())];
    const double reward = maps.reward(s, action).dot(mu) + eps;
    return negate ? -reward : reward;
  }
};

SearchOptions one_shot_options() {
  SearchOptions o;
  o.use_grid = true;
  o.grid_step = 0.5;
  return o;
}

SearchOptions warm_options(const Vec& warm) {
  SearchOptions o;
  o.use_grid = false;
  o.warm_starts.push_back(warm);
  return o;
}

// Online lambda re-searches keep a coarse global probe on the first level
// and chain warm starts through the remaining bisection levels.
LambdaOptions online_lambda_options(const Vec& warm) {
  LambdaOptions lo;
  lo.first_level.use_grid = true;
  lo.first_level.grid_step = 1.0;
  lo.first_level.warm_starts.push_back(warm);
  lo.later_levels.use_grid = false;
  return lo;
}

TrajectoryResult run_loop(const EnvSpec& spec, const RunConfig& cfg, StepSource& src, Rng& rng) {
  const FeatureMaps maps = spec.features();
  const Index p = maps.p();
  const Index k = maps.k();
  const bool cost_env = spec.sign == OutcomeSign::cost;
  const double budget = constraint_budget(cfg.p0, cfg.alpha);
  const int first_update = std::max(cfg.burn_in, 1);

  TrajectoryResult out;
  out.critic = Critic(k, cfg.zeta);
  out.first_update = first_update;
  out.history.reserve(static_cast<size_t>(cfg.T));
  out.outcomes.reserve(static_cast<size_t>(cfg.T));

  ActorObjective obj(p);
  Mat f0(k, cfg.T), f1(k, cfg.T);
  Vec raw0, raw1;

  Vec theta = Vec::Zero(p);
  double lambda = cfg.lambda_mode == LambdaMode::fixed ? cfg.lambda_fixed : 0.0;
  EnvState state;

  for (int t = 1; t <= cfg.T; ++t) {
    const Vec s = src.next_context(state, rng);
    const Vec g = maps.policy(s);
    const double u = rng.uniform01();
    const int action = t <= cfg.burn_in ? (u < 0.5 ? 1 : 0) : sample_action(theta, g, u);
    const double outcome = src.outcome(s, action, rng);
    const double reward = cost_env ? -outcome : outcome;

    out.critic.update(maps.reward(s, action), reward);
    f0.col(t - 1) = maps.reward(s, 0);
    f1.col(t - 1) = maps.reward(s, 1);
    obj.add(g, 0.0, 0.0);
    out.history.push_back({s, action, reward});
    out.outcomes.push_back(outcome);
    state.prev_context = s;
    state.prev_action = action;

    if (t < first_update) continue;

    // refresh per-action reward estimates under the new mu_hat
    raw0.noalias() = f0.leftCols(t).transpose() * out.critic.mu_hat();
    raw1.noalias() = f1.leftCols(t).transpose() * out.critic.mu_hat();
    for (Index i = 0; i < t; ++i) {
      const double a0 = cfg.clip ? clip_reward(raw0(i), cfg.clip_bound) : raw0(i);
      const double a1 = cfg.clip ? clip_reward(raw1(i), cfg.clip_bound) : raw1(i);
      obj.set_rewards(i, a0, a1);
    }

    const bool search_lambda =
        cfg.lambda_mode == LambdaMode::online_search &&
        (t == first_update || t % 10 == 0 || t == cfg.T);
    if (search_lambda) {
      LambdaOptions lo = online_lambda_options(theta);
      if (t == first_update) lo.first_level = one_shot_options();
      const LambdaSearchResult res = lambda_search(obj, p, budget, lo);
      lambda = res.lambda;
      theta = res.actor.theta;
      if (!res.feasible || !res.actor.converged) out.flagged = true;
    } else {
      SearchOptions so = t == first_update ? one_shot_options() : warm_options(theta);
      const MaximizeResult res = maximize_over(obj, p, lambda, so);
      theta = res.theta;
      if (!res.converged) out.flagged = true;
    }
    out.theta_path.push_back(theta);
    out.lambda_path.push_back(lambda);
  }

  out.theta_final = theta;
  out.lambda_final = lambda;
  return out;
}

}  // namespace

TrajectoryResult run_trajectory(const EnvSpec& spec, const RunConfig& cfg, Rng& rng) {
  cfg.validate();
  EnvSource src(spec);
  return run_loop(spec, cfg, src, rng);
}

BootstrapOutcome bootstrap_replicate(const EnvSpec& spec, const RunConfig& cfg,
                                     const std::vector<Vec>& context_history, const Vec& mu_hat_T,
                                     const std::vector<double>& centered_residuals, Rng rng) {
  cfg.validate();
  if (static_cast<int>(context_history.size()) != cfg.T) {
    throw config_error("bootstrap_replicate: context history length must equal run.T");
  }
  const FeatureMaps maps = spec.features();
  BootstrapSource src(context_history, mu_hat_T, centered_residuals, maps,
                      spec.sign == OutcomeSign::cost);
  TrajectoryResult run = run_loop(spec, cfg, src, rng);

  BootstrapOutcome out;
  out.lambda_final = run.lambda_final;
  out.flagged = run.flagged;
  out.pair.theta = run.theta_final;
  try {
    const double s2 = sigma2_hat(residuals(run.critic, run.history, maps), maps.k());
    const Mat cov = actor_covariance(run.critic.mu_hat(), run.theta_final, context_history, maps,
                                     run.lambda_final, s2);
    out.pair.var = cov.diagonal();
  } catch (const inference_error&) {
    out.flagged = true;
    out.pair.var = Vec::Zero(maps.p());
  }
  return out;
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min(workers, n);
  pool.reserve(static_cast<size_t>(count));
  for (int w = 0; w < count; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace acb
