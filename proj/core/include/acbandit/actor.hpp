#pragma once

#include <cmath>
#include <concepts>
#include <optional>
#include <string>
#include <vector>

#include "acbandit/errors.hpp"
#include "acbandit/types.hpp"

namespace acb {

/// Stochasticity-constraint configuration: both actions must keep
/// probability >= p0 for at least (1-alpha) of contexts; lambda is the
/// Lagrange multiplier of the quadratic relaxation.
struct ConstraintConfig {
  double p0 = 0.1;
  double alpha = 0.1;
  double lambda = 0.0;
};

/// Right-hand side of the quadratic relaxation, (log(p0/(1-p0)))^2 * alpha.
double constraint_budget(double p0, double alpha);

/// Average outer product (1/n) sum g g^T; throws data_error on empty input.
Mat empirical_gram(const std::vector<Vec>& policy_features);

/// theta^T G theta.
double constraint_value(const Vec& theta, const Mat& gram);

// Empirical regularized objective over a fixed context list:
//   J(theta) = (1/n) sum_i [ r0_i + (r1_i - r0_i) pi_theta(g_i) ]
//              - lambda theta^T Ghat theta.
// Contexts are stored column-wise so evaluation is a matrix-vector product
// plus a vectorized logistic; per-action reward estimates can be refreshed
// in place when the critic moves.
class ActorObjective {
 public:
  explicit ActorObjective(Index p);

  /// Append a context with its per-action reward estimates.
  void add(const Vec& g, double r0, double r1);
  /// Replace the reward estimates of context i.
  void set_rewards(Index i, double r0, double r1);

  Index size() const { return n_; }
  Index p() const { return p_; }

  double value(const Vec& theta, double lambda) const;
  Vec gradient(const Vec& theta, double lambda) const;
  Mat hessian(const Vec& theta, double lambda) const;

  /// Empirical Gram matrix (1/n) sum g g^T.
  Mat gram() const;
  double constraint(const Vec& theta) const;

 private:
  void ensure_capacity(Index want);

  Index p_;
  Index n_ = 0;
  Mat g_;        // p x capacity, first n_ columns in use
  Vec r0_, dr_;  // r_hat(s,0) and r_hat(s,1) - r_hat(s,0)
  double r0_sum_ = 0.0;
  Mat gram_sum_;
  mutable Eigen::ArrayXd x_, e_, pi_, w_;  // evaluation workspaces
};

struct SearchOptions {
  bool use_grid = true;
  double grid_lo = -2.0;
  double grid_hi = 2.0;
  double grid_step = 0.5;
  double pattern_init_step = 0.25;
  double pattern_min_step = 1e-4;
  int max_evals = 2000;
  bool polish = true;            // Newton polish when derivatives exist
  double stationarity_tol = 1e-3;
  std::vector<Vec> warm_starts;
};

struct MaximizeResult {
  Vec theta;
  double value = 0.0;
  int evals = 0;
  bool converged = false;
  double grad_inf_norm = std::numeric_limits<double>::quiet_NaN();
  bool grad_checked = false;
};

namespace detail {

// Probe comparison: strictly larger value wins; within a 1e-12 band the
// smaller-norm point wins (matches the regularizer's preference and makes
// the search deterministic).
inline bool probe_better(double v, double sqnorm, double best_v, double best_sqnorm) {
  if (v > best_v + 1e-12) return true;
  return v >= best_v - 1e-12 && sqnorm < best_sqnorm;
}

}  // namespace detail

template <class Obj>
concept DifferentiableObjective = requires(const Obj& o, const Vec& th, double lam) {
  { o.gradient(th, lam) } -> std::convertible_to<Vec>;
  { o.hessian(th, lam) } -> std::convertible_to<Mat>;
};

/// Maximize obj.value(theta, lambda) over R^p: coarse grid, then compass
/// pattern search from the best seed, then (when the objective exposes
/// derivatives) a short ascent polish with closed-form gradient/Hessian.
template <class Obj>
MaximizeResult maximize_over(const Obj& obj, Index p, double lambda, const SearchOptions& opt) {
  MaximizeResult res;
  res.theta = Vec::Zero(p);

  auto eval = [&](const Vec& th) {
    ++res.evals;
    return obj.value(th, lambda);
  };

  bool have_best = false;
  double best_v = 0.0, best_n2 = 0.0;
  Vec best = Vec::Zero(p);
  auto consider = [&](const Vec& th) {
    const double v = eval(th);
    const double n2 = th.squaredNorm();
    if (!have_best || detail::probe_better(v, n2, best_v, best_n2)) {
      have_best = true;
      best_v = v;
      best_n2 = n2;
      best = th;
    }
  };

  if (opt.use_grid) {
    const Index steps = static_cast<Index>(std::llround((opt.grid_hi - opt.grid_lo) / opt.grid_step)) + 1;
    std::vector<Index> idx(p, 0);
    Vec th(p);
    for (;;) {
      for (Index d = 0; d < p; ++d) th(d) = opt.grid_lo + static_cast<double>(idx[d]) * opt.grid_step;
      consider(th);
      Index d = 0;
      while (d < p && ++idx[d] == steps) idx[d++] = 0;
      if (d == p) break;
    }
  }
  for (const Vec& w : opt.warm_starts) {
    if (w.size() == p && w.allFinite()) consider(w);
  }
  if (!have_best) consider(Vec::Zero(p));

  // Compass search: probe +-step along each axis, move to the best strict
  // improvement, halve the step when a round fails.  The evaluation budget
  // covers the pattern phase only; the seeding grid is not counted.
  double step = opt.pattern_init_step;
  int pattern_evals = 0;
  Vec probe(p);
  while (step >= opt.pattern_min_step && pattern_evals < opt.max_evals) {
    bool moved = false;
    Vec round_best = best;
    double round_v = best_v, round_n2 = best_n2;
    for (Index d = 0; d < p && pattern_evals < opt.max_evals; ++d) {
      for (double sgn : {1.0, -1.0}) {
        probe = best;
        probe(d) += sgn * step;
        const double v = eval(probe);
        ++pattern_evals;
        const double n2 = probe.squaredNorm();
        if (v > best_v + 1e-14 && detail::probe_better(v, n2, round_v, round_n2)) {
          round_best = probe;
          round_v = v;
          round_n2 = n2;
          moved = true;
        }
      }
    }
    if (moved) {
      best = round_best;
      best_v = round_v;
      best_n2 = round_n2;
    } else {
      step *= 0.5;
    }
  }
  const bool pattern_done = step < opt.pattern_min_step;

  if constexpr (DifferentiableObjective<Obj>) {
    if (opt.polish) {
      for (int it = 0; it < 25; ++it) {
        Vec grad = obj.gradient(best, lambda);
        if (grad.lpNorm<Eigen::Infinity>() <= 0.2 * opt.stationarity_tol) break;
        Mat hess = obj.hessian(best, lambda);
        Vec dir = -hess.ldlt().solve(grad);
        if (!dir.allFinite() || dir.dot(grad) <= 0.0) dir = grad;  // fall back to ascent
        double t = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
          const Vec cand = best + t * dir;
          const double v = eval(cand);
          if (v > best_v) {
            best = cand;
            best_v = v;
            best_n2 = cand.squaredNorm();
            accepted = true;
            break;
          }
          t *= 0.5;
        }
        if (!accepted) break;
      }
    }
  }

  res.theta = best;
  res.value = best_v;
  if constexpr (DifferentiableObjective<Obj>) {
    const Vec grad = obj.gradient(best, lambda);
    res.grad_inf_norm = grad.lpNorm<Eigen::Infinity>();
    res.grad_checked = true;
    res.converged = res.grad_inf_norm <= opt.stationarity_tol;
  } else {
    res.converged = pattern_done;
  }
  return res;
}

struct LambdaOptions {
  double lo = 1.0 / 1024.0;
  double hi = 4.0;
  double tol = 1.0 / 256.0;
  SearchOptions first_level;   // used for the first maximization
  SearchOptions later_levels;  // warm-started from the previous level
};

struct LambdaSearchResult {
  double lambda = 0.0;
  MaximizeResult actor;
  double constraint = 0.0;
  bool feasible = false;  // false: constraint unsatisfiable even at lambda_max
  int levels = 0;
};

/// Smallest lambda in [lo, hi] (to absolute tolerance tol, by bisection)
/// whose maximizer satisfies obj.constraint(theta) <= budget.  Bisection is
/// justified by the monotonicity of the constraint value in lambda.
template <class Obj>
LambdaSearchResult lambda_search(const Obj& obj, Index p, double budget, const LambdaOptions& opt) {
  LambdaSearchResult out;
  SearchOptions level_opt = opt.first_level;

  auto solve_at = [&](double lam) {
    MaximizeResult r = maximize_over(obj, p, lam, level_opt);
    ++out.levels;
    level_opt = opt.later_levels;
    level_opt.warm_starts.clear();
    level_opt.warm_starts.push_back(r.theta);
    return r;
  };

  double hi = opt.hi, lo = opt.lo;
  MaximizeResult res_hi = solve_at(hi);
  double q_hi = obj.constraint(res_hi.theta);
  if (q_hi > budget) {
    out.lambda = hi;
    out.actor = std::move(res_hi);
    out.constraint = q_hi;
    out.feasible = false;
    return out;
  }

  MaximizeResult res_lo = solve_at(lo);
  const double q_lo = obj.constraint(res_lo.theta);
  if (q_lo <= budget) {
    out.lambda = lo;
    out.actor = std::move(res_lo);
    out.constraint = q_lo;
    out.feasible = true;
    return out;
  }

  while (hi - lo > opt.tol) {
    const double mid = 0.5 * (lo + hi);
    MaximizeResult res_mid = solve_at(mid);
    const double q_mid = obj.constraint(res_mid.theta);
    if (q_mid <= budget) {
      hi = mid;
      res_hi = std::move(res_mid);
      q_hi = q_mid;
    } else {
      lo = mid;
    }
  }

  out.lambda = hi;
  out.actor = std::move(res_hi);
  out.constraint = q_hi;
  out.feasible = true;
  return out;
}

}  // namespace acb
