#include "acbandit/envs.hpp"

#include <cmath>
#include <stdexcept>

namespace acb {

namespace {
constexpr double kArCoef = 0.4;
const double kArNoiseSd = std::sqrt(1.0 - kArCoef * kArCoef);  // stationary unit variance
}  // namespace

Vec env_next_context(const EnvSpec& spec, const EnvState& state, Rng& rng) {
  if (spec.kind == EnvKind::toy_binary) {
    Vec s(1);
    s(0) = rng.uniform01() < 0.5 ? 1.0 : -1.0;
    return s;
  }

  Vec s(3);
  const bool first = !state.prev_context.has_value();
  if (first || spec.kind == EnvKind::iid || spec.kind == EnvKind::nonlinear) {
    s(0) = rng.gauss();
    s(1) = rng.gauss();
    s(2) = rng.gauss();
    return s;
  }

  const Vec& prev = *state.prev_context;
  s(0) = kArCoef * prev(0) + kArNoiseSd * rng.gauss();
  s(1) = kArCoef * prev(1) + kArNoiseSd * rng.gauss();
  if (spec.kind == EnvKind::ar1) {
    s(2) = rng.gauss();
  } else {  // burden: disengagement grows with past treatment
    if (!state.prev_action.has_value()) {
      throw std::logic_error("env_next_context: burden dynamics need the previous action");
    }
    const double a = static_cast<double>(*state.prev_action);
    s(2) = 0.4 * prev(2) + 0.2 * prev(2) * a + 0.4 * a + rng.gauss();
  }
  return s;
}

double env_true_mean(const EnvSpec& spec, const Vec& s, int action) {
  const double a = static_cast<double>(action);
  switch (spec.kind) {
    case EnvKind::toy_binary:
      return 1.0 + s(0) + a + s(0) * a;  // mu* = [1,1,1,1]
    case EnvKind::burden:
      return 10.0 - 0.4 * s(0) - 0.4 * s(1) - a * (0.2 + 0.2 * s(0) + 0.2 * s(1)) +
             spec.tau * s(2);
    case EnvKind::nonlinear: {
      const double s1 = (1.0 - spec.alpha_nl) * s(0) + spec.alpha_nl * s(0) * s(0);
      return 10.0 - 0.4 * s1 - 0.4 * s(1) - a * (0.2 + 0.2 * s1 + 0.2 * s(1)) + 0.4 * s(2);
    }
    case EnvKind::iid:
    case EnvKind::ar1:
      return 10.0 - 0.4 * s(0) - 0.4 * s(1) - a * (0.2 + 0.2 * s(0) + 0.2 * s(1)) + 0.4 * s(2);
  }
  throw std::logic_error("env_true_mean: unknown environment kind");
}

double env_outcome(const EnvSpec& spec, const Vec& s, int action, Rng& rng) {
  return env_true_mean(spec, s, action) + spec.noise_sd() * rng.gauss();
}

}  // namespace acb
