#pragma once

#include <cstdint>
#include <vector>

#include "acbandit/actor.hpp"
#include "acbandit/critic.hpp"
#include "acbandit/envs.hpp"
#include "acbandit/inference.hpp"
#include "acbandit/rng.hpp"

namespace acb {

enum class LambdaMode { online_search, fixed };

struct RunConfig {
  int T = 200;
  int burn_in = 20;
  double p0 = 0.1;
  double alpha = 0.1;
  LambdaMode lambda_mode = LambdaMode::online_search;
  double lambda_fixed = 0.0;  // multiplier when lambda_mode == fixed
  bool clip = true;           // reward-estimate clipping (reproduction configs disable)
  double clip_bound = 1.0;    // K; estimates clamped to [-(K+1), K+1]
  double zeta = 1.0;          // ridge weight
  std::uint64_t seed = 0;
  int replicate_count = 1;
  int bootstrap_B = 0;
  double ci_level = 0.95;
  int workers = 1;

  void validate() const;  // throws config_error naming the offending key
};

struct TrajectoryResult {
  std::vector<DecisionRecord> history;  // rewards in the maximization sign
  std::vector<double> outcomes;         // raw environment outcomes (native sign)
  std::vector<Vec> theta_path;          // one entry per actor update, t = first_update..T
  std::vector<double> lambda_path;      // multiplier in effect after each update
  Vec theta_final;
  double lambda_final = 0.0;
  Critic critic;
  int first_update = 0;
  bool flagged = false;  // optimizer non-convergence or infeasible constraint

  TrajectoryResult() : critic(1, 1.0) {}
};

/// One full online actor-critic run: coin-flip actions through the burn-in,
/// policy actions afterwards, critic update every point, actor update from
/// the end of the burn-in on, lambda re-searched on its schedule.
TrajectoryResult run_trajectory(const EnvSpec& spec, const RunConfig& cfg, Rng& rng);

struct BootstrapOutcome {
  BootstrapPair pair;
  double lambda_final = 0.0;
  bool flagged = false;
};

/// Algorithm-level residual bootstrap: rerun the actor-critic loop over the
/// fixed observed contexts, drawing actions from the evolving bootstrap
/// policy and rewards from mu_hat_T plus a resampled centered residual.
BootstrapOutcome bootstrap_replicate(const EnvSpec& spec, const RunConfig& cfg,
                                     const std::vector<Vec>& context_history, const Vec& mu_hat_T,
                                     const std::vector<double>& centered_residuals, Rng rng);

/// Run fn(0..n-1) on the given number of worker threads.  Results must be
/// written to per-index slots; the output is independent of worker count.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

}  // namespace acb
