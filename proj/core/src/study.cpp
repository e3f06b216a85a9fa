#include "acbandit/study.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "acbandit/csv.hpp"
#include "acbandit/policy.hpp"

namespace acb {

namespace {

constexpr std::uint64_t kTagOracle = 1;
constexpr std::uint64_t kTagMyopic = 2;
constexpr std::uint64_t kTagCostEval = 3;
constexpr std::uint64_t kTagRegret = 4;

constexpr int kMcStationaryDraws = 5000;    // action-independent dynamics
constexpr int kMcTrajectorySteps = 100000;  // burden dynamics, first 10% discarded

/// True outcome mean in the sign the actor maximizes.
double signed_mean(const EnvSpec& spec, const Vec& s, int action) {
  const double m = env_true_mean(spec, s, action);
  return spec.sign == OutcomeSign::cost ? -m : m;
}

/// Population objective from i.i.d. stationary context draws.
ActorObjective draw_objective(const EnvSpec& spec, Rng rng, int n) {
  const FeatureMaps maps = spec.features();
  ActorObjective obj(maps.p());
  for (int i = 0; i < n; ++i) {
    const Vec s = env_next_context(spec, EnvState{}, rng);
    obj.add(maps.policy(s), signed_mean(spec, s, 0), signed_mean(spec, s, 1));
  }
  return obj;
}

// Burden-dynamics population objective.  The stationary context law depends
// on the candidate policy, so each evaluation replays the policy through a
// fresh 100000-step simulation built from one shared noise realization
// (common random numbers across candidates); the first 10% is discarded.
class StationaryObjective {
 public:
  StationaryObjective(const EnvSpec& spec, Rng rng, int n)
      : spec_(spec), n_(n), discard_(n / 10) {
    s1_.resize(n);
    s2_.resize(n);
    xi3_.resize(n);
    u_.resize(n);
    base12_.resize(n);
    dcost_.resize(n);
    double s1 = rng.gauss(), s2 = rng.gauss();
    s3_init_ = rng.gauss();
    u_[0] = rng.uniform01();
    s1_[0] = s1;
    s2_[0] = s2;
    const double ar_sd = std::sqrt(1.0 - 0.16);
    for (int t = 1; t < n; ++t) {
      s1 = 0.4 * s1 + ar_sd * rng.gauss();
      s2 = 0.4 * s2 + ar_sd * rng.gauss();
      xi3_[t] = rng.gauss();
      u_[t] = rng.uniform01();
      s1_[t] = s1;
      s2_[t] = s2;
    }
    for (int t = 0; t < n; ++t) {
      base12_[t] = 10.0 - 0.4 * s1_[t] - 0.4 * s2_[t];
      dcost_[t] = -(0.2 + 0.2 * s1_[t] + 0.2 * s2_[t]);
    }
  }

  double value(const Vec& theta, double lambda) const {
    double cost, q;
    simulate(theta, cost, q);
    return -(cost + lambda * q);
  }

  double constraint(const Vec& theta) const {
    double cost, q;
    simulate(theta, cost, q);
    return q;
  }

 private:
  void simulate(const Vec& theta, double& mean_cost, double& quad) const {
    const double t0 = theta(0), t1 = theta(1), t2 = theta(2), t3 = theta(3);
    double s3 = s3_init_;
    double a_prev = 0.0;
    double acc = 0.0, q = 0.0;
    for (int t = 0; t < n_; ++t) {
      if (t > 0) s3 = 0.4 * s3 + 0.2 * s3 * a_prev + 0.4 * a_prev + xi3_[t];
      const double x = t0 + t1 * s1_[t] + t2 * s2_[t] + t3 * s3;
      const double pi = sigmoid(x);
      if (t >= discard_) {
        acc += base12_[t] + spec_.tau * s3 + dcost_[t] * pi;
        q += x * x;
      }
      a_prev = u_[t] < pi ? 1.0 : 0.0;
    }
    const double cnt = static_cast<double>(n_ - discard_);
    mean_cost = acc / cnt;
    quad = q / cnt;
  }

  EnvSpec spec_;
  int n_, discard_;
  std::vector<double> s1_, s2_, xi3_, u_, base12_, dcost_;
  double s3_init_ = 0.0;
};

LambdaOptions one_shot_lambda_options() {
  return LambdaOptions{};  // full grid + pattern search at every bisection level
}

template <class Obj>
OracleResult run_oracle(const Obj& obj, Index p, double budget, int mc_size) {
  const LambdaSearchResult res = lambda_search(obj, p, budget, one_shot_lambda_options());
  OracleResult out;
  out.lambda_star = res.lambda;
  out.theta_star = res.actor.theta;
  out.constraint = res.constraint;
  out.budget = budget;
  out.mc_size = mc_size;
  out.feasible = res.feasible;
  return out;
}

}  // namespace

OracleResult oracle_policy(const EnvSpec& spec, double p0, double alpha, std::uint64_t seed) {
  const double budget = constraint_budget(p0, alpha);
  const Index p = spec.features().p();
  if (spec.action_dependent_dynamics()) {
    StationaryObjective obj(spec, Rng::tagged_stream(seed, kTagOracle), kMcTrajectorySteps);
    return run_oracle(obj, p, budget, kMcTrajectorySteps);
  }
  const ActorObjective obj = draw_objective(spec, Rng::tagged_stream(seed, kTagOracle),
                                            kMcStationaryDraws);
  return run_oracle(obj, p, budget, kMcStationaryDraws);
}

MaximizeResult population_maximize(const EnvSpec& spec, double lambda, std::uint64_t seed) {
  const Index p = spec.features().p();
  const SearchOptions opt;  // full grid + pattern
  if (spec.action_dependent_dynamics()) {
    StationaryObjective obj(spec, Rng::tagged_stream(seed, kTagOracle), kMcTrajectorySteps);
    return maximize_over(obj, p, lambda, opt);
  }
  const ActorObjective obj = draw_objective(spec, Rng::tagged_stream(seed, kTagOracle),
                                            kMcStationaryDraws);
  return maximize_over(obj, p, lambda, opt);
}

MyopicResult myopic_equilibrium(const EnvSpec& spec, double p0, double alpha, std::uint64_t seed,
                                const Vec* theta_init) {
  const double budget = constraint_budget(p0, alpha);
  const FeatureMaps maps = spec.features();
  const Index p = maps.p();
  const int discard = kMcTrajectorySteps / 10;

  Vec theta = theta_init != nullptr ? *theta_init : Vec::Zero(p);
  Vec prev = theta;
  double lambda = 0.0;

  for (int sweep = 1; sweep <= 50; ++sweep) {
    // Same noise realization every sweep (common random numbers), so the
    // sweep map is a deterministic function of theta.
    Rng rng = Rng::tagged_stream(seed, kTagMyopic);
    ActorObjective obj(p);
    EnvState state;
    for (int t = 0; t < kMcTrajectorySteps; ++t) {
      const Vec s = env_next_context(spec, state, rng);
      const Vec g = maps.policy(s);
      const int action = sample_action(theta, g, rng.uniform01());
      if (t >= discard) obj.add(g, signed_mean(spec, s, 0), signed_mean(spec, s, 1));
      state.prev_context = s;
      state.prev_action = action;
    }
    LambdaOptions lo;
    lo.later_levels.use_grid = false;  // warm-started refinement levels
    const LambdaSearchResult res = lambda_search(obj, p, budget, lo);
    prev = theta;
    theta = res.actor.theta;
    lambda = res.lambda;
    if ((theta - prev).lpNorm<Eigen::Infinity>() < 1e-3) {
      return MyopicResult{theta, lambda, sweep};
    }
  }
  std::ostringstream os;
  os << "myopic_equilibrium: no fixed point after 50 sweeps; last iterates ["
     << prev.transpose() << "] -> [" << theta.transpose() << "]";
  throw inference_error(os.str());
}

double regularized_cost_eval(const Vec& theta, const EnvSpec& spec, double lambda,
                             std::uint64_t seed) {
  if (spec.action_dependent_dynamics()) {
    StationaryObjective obj(spec, Rng::tagged_stream(seed, kTagCostEval), kMcTrajectorySteps);
    return -obj.value(theta, lambda);
  }
  const ActorObjective obj = draw_objective(spec, Rng::tagged_stream(seed, kTagCostEval),
                                            kMcStationaryDraws);
  return -obj.value(theta, lambda);
}

namespace {

double population_value(const EnvSpec& spec, const Vec& theta, std::uint64_t seed) {
  if (spec.action_dependent_dynamics()) {
    return StationaryObjective(spec, Rng::tagged_stream(seed, kTagRegret), kMcTrajectorySteps)
        .value(theta, 0.0);
  }
  return draw_objective(spec, Rng::tagged_stream(seed, kTagRegret), kMcStationaryDraws)
      .value(theta, 0.0);
}

ReplicateRow compute_replicate(const EnvSpec& spec, const RunConfig& cfg, const Vec& theta_star,
                               double lambda_star, double value_star,
                               const std::vector<int>& checkpoints, int rep) {
  const FeatureMaps maps = spec.features();
  const Index p = maps.p();
  ReplicateRow row;
  row.index = rep;
  row.theta_hat = Vec::Zero(p);
  row.plugin_var = Vec::Zero(p);
  row.wald_hit.assign(static_cast<size_t>(p), 0);
  row.ptb_hit.assign(static_cast<size_t>(p), 0);

  Rng rng = Rng::replicate_stream(cfg.seed, static_cast<std::uint64_t>(rep));
  TrajectoryResult run = run_trajectory(spec, cfg, rng);
  row.flagged = run.flagged;
  row.lambda_hat = csv_round(run.lambda_final);
  for (Index i = 0; i < p; ++i) row.theta_hat(i) = csv_round(run.theta_final(i));

  std::vector<Vec> contexts;
  contexts.reserve(run.history.size());
  double cum = 0.0;
  size_t ci = 0;
  row.cum_regret.assign(checkpoints.size(), 0.0);
  for (size_t t = 0; t < run.history.size(); ++t) {
    contexts.push_back(run.history[t].context);
    cum += value_star - signed_mean(spec, run.history[t].context, run.history[t].action);
    while (ci < checkpoints.size() && checkpoints[ci] == static_cast<int>(t) + 1) {
      row.cum_regret[ci++] = csv_round(cum);
    }
  }

  try {
    std::vector<double> resid = residuals(run.critic, run.history, maps);
    const double s2 = sigma2_hat(resid, maps.k());
    const Mat cov = actor_covariance(run.critic.mu_hat(), run.theta_final, contexts, maps,
                                     run.lambda_final, s2);
    for (Index i = 0; i < p; ++i) row.plugin_var(i) = csv_round(cov.diagonal()(i));

    const IntervalSet wald = wald_ci(run.theta_final, cov, cfg.T, cfg.ci_level);
    for (Index i = 0; i < p; ++i) row.wald_hit[static_cast<size_t>(i)] = wald.contains(i, theta_star(i));

    if (cfg.bootstrap_B > 0) {
      const double mean =
          std::accumulate(resid.begin(), resid.end(), 0.0) / static_cast<double>(resid.size());
      for (double& e : resid) e -= mean;
      std::vector<BootstrapPair> pairs;
      pairs.reserve(static_cast<size_t>(cfg.bootstrap_B));
      for (int b = 0; b < cfg.bootstrap_B; ++b) {
        BootstrapOutcome bo = bootstrap_replicate(
            spec, cfg, contexts, run.critic.mu_hat(), resid,
            Rng::bootstrap_stream(cfg.seed, static_cast<std::uint64_t>(rep),
                                  static_cast<std::uint64_t>(b)));
        if (bo.flagged) {
          ++row.boot_flagged;
        } else {
          pairs.push_back(std::move(bo.pair));
        }
      }
      const IntervalSet ptb =
          percentile_t_ci(run.theta_final, cov.diagonal(), pairs, cfg.T, cfg.ci_level);
      for (Index i = 0; i < p; ++i) row.ptb_hit[static_cast<size_t>(i)] = ptb.contains(i, theta_star(i));
    }
  } catch (const std::runtime_error&) {
    row.flagged = true;
  }

  row.reg_cost = csv_round(regularized_cost_eval(run.theta_final, spec, lambda_star, cfg.seed));
  return row;
}

}  // namespace

namespace {

std::vector<int> decile_checkpoints(int T) {
  std::vector<int> checkpoints;
  for (int j = 1; j <= 10; ++j) {
    const int t = T * j / 10;
    if (t >= 1 && (checkpoints.empty() || checkpoints.back() != t)) checkpoints.push_back(t);
  }
  return checkpoints;
}

}  // namespace

ReplicateRow study_replicate_row(const EnvSpec& spec, const RunConfig& cfg, const Vec& theta_star,
                                 double lambda_star, int rep) {
  cfg.validate();
  const double value_star = population_value(spec, theta_star, cfg.seed);
  return compute_replicate(spec, cfg, theta_star, lambda_star, value_star,
                           decile_checkpoints(cfg.T), rep);
}

StudyReport replicate_study(const EnvSpec& spec, const RunConfig& cfg, const Vec& theta_star,
                            double lambda_star) {
  cfg.validate();
  const Index p = spec.features().p();
  if (theta_star.size() != p) {
    throw config_error("replicate_study: theta_star length does not match the policy dimension");
  }

  const std::vector<int> checkpoints = decile_checkpoints(cfg.T);

  const double value_star = population_value(spec, theta_star, cfg.seed);

  StudyReport report;
  report.theta_star = theta_star;
  report.lambda_star = lambda_star;
  report.regret_checkpoints = checkpoints;
  report.rows.resize(static_cast<size_t>(cfg.replicate_count));
  parallel_for(cfg.replicate_count, cfg.workers, [&](int rep) {
    report.rows[static_cast<size_t>(rep)] =
        compute_replicate(spec, cfg, theta_star, lambda_star, value_star, checkpoints, rep);
  });

  report.agg = aggregate_rows(report.rows, theta_star);
  report.mean_cum_regret.assign(checkpoints.size(), 0.0);
  int used = 0;
  for (const auto& row : report.rows) {
    if (row.flagged) continue;
    ++used;
    for (size_t j = 0; j < checkpoints.size(); ++j) report.mean_cum_regret[j] += row.cum_regret[j];
  }
  for (double& v : report.mean_cum_regret) v /= std::max(used, 1);

  const double failure_rate =
      static_cast<double>(report.agg.flagged) / static_cast<double>(cfg.replicate_count);
  if (failure_rate >= 0.01) {
    throw inference_error("replicate_study: " + std::to_string(report.agg.flagged) + " of " +
                          std::to_string(cfg.replicate_count) +
                          " replicates flagged (optimizer failures must stay below 1%)");
  }
  return report;
}

StudyAggregates aggregate_rows(const std::vector<ReplicateRow>& rows, const Vec& theta_star) {
  const Index p = theta_star.size();
  StudyAggregates agg;
  agg.bias = Vec::Zero(p);
  agg.mse = Vec::Zero(p);
  agg.coverage_wald = Vec::Zero(p);
  agg.coverage_ptb = Vec::Zero(p);
  agg.mean_plugin_var = Vec::Zero(p);
  for (const auto& row : rows) {
    if (row.flagged) {
      ++agg.flagged;
      continue;
    }
    ++agg.used;
    for (Index i = 0; i < p; ++i) {
      const double d = row.theta_hat(i) - theta_star(i);
      agg.bias(i) += d;
      agg.mse(i) += d * d;
      agg.coverage_wald(i) += row.wald_hit[static_cast<size_t>(i)];
      agg.coverage_ptb(i) += row.ptb_hit[static_cast<size_t>(i)];
      agg.mean_plugin_var(i) += row.plugin_var(i);
    }
    agg.mean_reg_cost += row.reg_cost;
  }
  const double n = std::max(agg.used, 1);
  agg.bias /= n;
  agg.mse /= n;
  agg.coverage_wald /= n;
  agg.coverage_ptb /= n;
  agg.mean_plugin_var /= n;
  agg.mean_reg_cost /= n;
  return agg;
}

std::vector<std::pair<int, double>> regret_curve(const EnvSpec& spec, const RunConfig& cfg,
                                                 const Vec& theta_star,
                                                 const std::vector<int>& checkpoints) {
  cfg.validate();
  const double value_star = population_value(spec, theta_star, cfg.seed);
  std::vector<std::vector<double>> per_rep(static_cast<size_t>(cfg.replicate_count));
  parallel_for(cfg.replicate_count, cfg.workers, [&](int rep) {
    Rng rng = Rng::replicate_stream(cfg.seed, static_cast<std::uint64_t>(rep));
    const TrajectoryResult run = run_trajectory(spec, cfg, rng);
    std::vector<double> vals(checkpoints.size(), 0.0);
    double cum = 0.0;
    size_t ci = 0;
    for (size_t t = 0; t < run.history.size(); ++t) {
      cum += value_star - signed_mean(spec, run.history[t].context, run.history[t].action);
      while (ci < checkpoints.size() && checkpoints[ci] == static_cast<int>(t) + 1) {
        vals[ci++] = cum;
      }
    }
    per_rep[static_cast<size_t>(rep)] = std::move(vals);
  });

  std::vector<std::pair<int, double>> out;
  for (size_t j = 0; j < checkpoints.size(); ++j) {
    double acc = 0.0;
    for (const auto& vals : per_rep) acc += vals[j];
    out.emplace_back(checkpoints[j], acc / static_cast<double>(cfg.replicate_count));
  }
  return out;
}

}  // namespace acb
