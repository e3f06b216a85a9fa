#pragma once

#include <optional>

#include "acbandit/features.hpp"
#include "acbandit/rng.hpp"
#include "acbandit/types.hpp"

namespace acb {

// Generative environments behind a single contract.  All of them share the
// mobile-health cost template
//   C = 10 - .4 s1 - .4 s2 - A (0.2 + 0.2 s1 + 0.2 s2) + c3 s3 + noise
// and differ in context dynamics (iid, AR(1), action-dependent burden),
// the s3 cost weight, or a controlled nonlinearity in s1.  toy_binary is
// the two-point-context reward model used for the variance studies.
enum class EnvKind { iid, ar1, burden, nonlinear, toy_binary };

enum class OutcomeSign { reward, cost };

struct EnvSpec {
  EnvKind kind = EnvKind::iid;
  double tau = 0.0;       // burden size; burden kind only
  double alpha_nl = 0.0;  // nonlinearity mix in [0,1]; nonlinear kind only
  OutcomeSign sign = OutcomeSign::cost;

  Index context_dim() const { return kind == EnvKind::toy_binary ? 1 : 3; }
  FeatureMaps features() const { return FeatureMaps{context_dim()}; }
  double noise_sd() const { return kind == EnvKind::toy_binary ? 9.0 : 1.0; }
  bool action_dependent_dynamics() const { return kind == EnvKind::burden; }
};

/// Carry-over between decision points for autoregressive dynamics.
struct EnvState {
  std::optional<Vec> prev_context;
  std::optional<int> prev_action;
};

/// Draw the next context.  Per step the context noise components are
/// consumed from rng in index order (one uniform for toy_binary).
Vec env_next_context(const EnvSpec& spec, const EnvState& state, Rng& rng);

/// Deterministic mean of env_outcome (in the environment's native sign).
double env_true_mean(const EnvSpec& spec, const Vec& s, int action);

/// Mean plus one noise draw: N(0,1) for the mobile-health kinds, N(0,81)
/// for toy_binary.
double env_outcome(const EnvSpec& spec, const Vec& s, int action, Rng& rng);

}  // namespace acb
