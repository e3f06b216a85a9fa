#include <doctest.h>

#include <cstdlib>

#include "acbandit/config.hpp"
#include "acbandit/errors.hpp"

using namespace acb;

namespace {

const char* kSample = R"(
# reproduction config
[env]
kind = burden
tau = 0.4
sign = cost

[constraint]
p0 = 0.1
alpha = 0.1
lambda_mode = online

[run]
T = 200
burn_in = 20
clip = false
zeta = 1.0
seed = 20260809
replicates = 500

[inference]
bootstrap_B = 200
level = 0.95

[oracle]
pinned = true
lambda_star = 0.06
theta_star = -0.1922 0.3547 0.3312 -0.2313
)";

}  // namespace

TEST_CASE("parse a full experiment file") {
  const Experiment exp = parse_experiment(kSample);
  CHECK(exp.env.kind == EnvKind::burden);
  CHECK(exp.env.tau == 0.4);
  CHECK(exp.env.sign == OutcomeSign::cost);
  CHECK(exp.run.T == 200);
  CHECK(exp.run.burn_in == 20);
  CHECK(exp.run.p0 == 0.1);
  CHECK(exp.run.lambda_mode == LambdaMode::online_search);
  CHECK_FALSE(exp.run.clip);
  CHECK(exp.run.seed == 20260809);
  CHECK(exp.run.replicate_count == 500);
  CHECK(exp.run.bootstrap_B == 200);
  CHECK(exp.oracle.pinned);
  CHECK(exp.oracle.theta_star.size() == 4);
  CHECK(exp.oracle.theta_star(3) == -0.2313);
}

TEST_CASE("defaults fill in when keys are omitted") {
  const Experiment exp = parse_experiment("[env]\nkind = iid\n[run]\nT = 100\n");
  CHECK(exp.run.burn_in == 20);
  CHECK(exp.run.p0 == 0.1);
  CHECK(exp.run.alpha == 0.1);
  CHECK(exp.run.zeta == 1.0);
  CHECK(exp.run.clip);  // library default: clipping on
  CHECK(exp.env.sign == OutcomeSign::cost);

  const Experiment toy = parse_experiment("[env]\nkind = toy_binary\n[run]\nT = 100\n");
  CHECK(toy.env.sign == OutcomeSign::reward);  // toy model is a reward
}

TEST_CASE("unknown and invalid keys are rejected by name") {
  CHECK_THROWS_WITH_AS(parse_experiment("[env]\nkind = iid\nfoo = 1\n[run]\nT = 10\n"),
                       doctest::Contains("env.foo"), config_error);
  CHECK_THROWS_WITH_AS(parse_experiment("[env]\nkind = marshmallow\n[run]\nT = 10\n"),
                       doctest::Contains("env.kind"), config_error);
  CHECK_THROWS_WITH_AS(parse_experiment("[run]\nT = 10\n"), doctest::Contains("env.kind"),
                       config_error);
  CHECK_THROWS_WITH_AS(parse_experiment("[env]\nkind = iid\n"), doctest::Contains("run.T"),
                       config_error);
  // kind-specific parameters stay with their kind
  CHECK_THROWS_WITH_AS(parse_experiment("[env]\nkind = iid\ntau = 0.2\n[run]\nT = 30\n"),
                       doctest::Contains("env.tau"), config_error);
  CHECK_THROWS_WITH_AS(
      parse_experiment("[env]\nkind = iid\n[run]\nT = 10\nburn_in = 20\n"),
      doctest::Contains("run.T"), config_error);
  CHECK_THROWS_WITH_AS(parse_experiment("[env]\nkind = iid\n[run]\nT = abc\n"),
                       doctest::Contains("run.T"), config_error);
}

TEST_CASE("environment variables override config values") {
  setenv("ACB_RUN_SEED", "777", 1);
  setenv("ACB_CONSTRAINT_P0", "0.2", 1);
  const Experiment exp = parse_experiment("[env]\nkind = iid\n[run]\nT = 100\nseed = 1\n");
  unsetenv("ACB_RUN_SEED");
  unsetenv("ACB_CONSTRAINT_P0");
  CHECK(exp.run.seed == 777);
  CHECK(exp.run.p0 == 0.2);
}
