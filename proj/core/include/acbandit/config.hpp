#pragma once

#include <string>

#include "acbandit/harness.hpp"

namespace acb {

/// Ground-truth values pinned in reproduction configs (tagged as pinned in
/// outputs) so harness validation does not depend on the oracle solver.
struct OracleConfig {
  bool pinned = false;
  double lambda_star = 0.0;
  Vec theta_star;
};

struct Experiment {
  EnvSpec env;
  RunConfig run;
  OracleConfig oracle;
  std::string output_dir;  // [output] dir; overridden by --out
};

// Experiment files are INI-style text with sections [env], [constraint],
// [run], [inference], [oracle], [output].  Unknown keys are rejected with
// the offending dotted key named.  Every key can be overridden through the
// environment as ACB_<SECTION>_<KEY> (e.g. ACB_RUN_SEED=7).
Experiment parse_experiment(const std::string& text);
Experiment load_experiment(const std::string& path);

/// Apply ACB_* environment overrides in place.
void apply_env_overrides(Experiment& exp);

}  // namespace acb
