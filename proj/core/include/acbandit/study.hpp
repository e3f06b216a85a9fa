#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "acbandit/harness.hpp"

namespace acb {

struct OracleResult {
  double lambda_star = 0.0;
  Vec theta_star;
  double constraint = 0.0;  // theta*^T Ghat theta* under its own distribution
  double budget = 0.0;
  int mc_size = 0;
  bool feasible = false;
};

/// Population-scale oracle: smallest lambda whose regularized-optimal policy
/// satisfies the quadratic constraint.  Monte Carlo sizes follow the study
/// conventions: 5000 stationary draws when dynamics ignore actions, a
/// 100000-step trajectory with the first 10% discarded (regenerated per
/// candidate policy, common random numbers) for burden dynamics.
OracleResult oracle_policy(const EnvSpec& spec, double p0, double alpha, std::uint64_t seed);

/// Population maximizer of the regularized objective at a fixed lambda.
MaximizeResult population_maximize(const EnvSpec& spec, double lambda, std::uint64_t seed);

struct MyopicResult {
  Vec theta_eq;
  double lambda_eq = 0.0;
  int sweeps = 0;
};

/// Fixed point of: simulate the stationary context distribution under the
/// current policy, re-solve the actor and lambda search against it, repeat.
/// Throws inference_error after 50 sweeps without convergence.
MyopicResult myopic_equilibrium(const EnvSpec& spec, double p0, double alpha, std::uint64_t seed,
                                const Vec* theta_init = nullptr);

/// Monte Carlo regularized average cost of pi_theta (cost sign: lower is
/// better; reward environments are negated).  Deterministic given seed.
double regularized_cost_eval(const Vec& theta, const EnvSpec& spec, double lambda,
                             std::uint64_t seed);

struct ReplicateRow {
  int index = 0;
  bool flagged = false;
  Vec theta_hat;
  double lambda_hat = 0.0;
  Vec plugin_var;
  std::vector<int> wald_hit, ptb_hit;  // per-coordinate indicator vs theta*
  double reg_cost = 0.0;
  int boot_flagged = 0;
  std::vector<double> cum_regret;  // noise-free cumulative regret at the checkpoints
};

struct StudyAggregates {
  Vec bias, mse, coverage_wald, coverage_ptb, mean_plugin_var;
  double mean_reg_cost = 0.0;
  int flagged = 0;
  int used = 0;
};

struct StudyReport {
  std::vector<ReplicateRow> rows;
  StudyAggregates agg;
  std::vector<int> regret_checkpoints;
  std::vector<double> mean_cum_regret;
  Vec theta_star;
  double lambda_star = 0.0;
};

/// Run replicate_count independent trajectories (parallel across workers,
/// deterministic in the master seed), per-replicate inference, and
/// bias/MSE/coverage aggregation against theta_star.  Aggregates are formed
/// from the 9-significant-digit values that land in the CSV, so resumed and
/// fresh runs agree bit-for-bit.
StudyReport replicate_study(const EnvSpec& spec, const RunConfig& cfg, const Vec& theta_star,
                            double lambda_star);

/// Bias/MSE/coverage reduction over per-replicate rows (flagged rows are
/// excluded).  Shared by replicate_study and the CLI's study resume path so
/// both aggregate identically.
StudyAggregates aggregate_rows(const std::vector<ReplicateRow>& rows, const Vec& theta_star);

/// Compute a single replicate row by index, identical to the row
/// replicate_study would produce (used by the CLI resume path).
ReplicateRow study_replicate_row(const EnvSpec& spec, const RunConfig& cfg, const Vec& theta_star,
                                 double lambda_star, int rep);

/// Mean noise-free cumulative regret at the given decision-point checkpoints,
/// averaged over cfg.replicate_count trajectories.
std::vector<std::pair<int, double>> regret_curve(const EnvSpec& spec, const RunConfig& cfg,
                                                 const Vec& theta_star,
                                                 const std::vector<int>& checkpoints);

}  // namespace acb
