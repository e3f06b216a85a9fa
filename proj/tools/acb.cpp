// Command-line driver: single trajectories, replicate studies, and the
// population oracle / myopic-equilibrium solvers, all emitting diffable CSV.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "acbandit/config.hpp"
#include "acbandit/csv.hpp"
#include "acbandit/study.hpp"

namespace fs = std::filesystem;
using namespace acb;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  int workers = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("config", args.config_path, "experiment config file")->required();
  cmd->add_option("--out", args.out_dir, "output directory (created if missing)");
  cmd->add_option("--seed", args.seed, "64-bit master seed (overrides the config)");
  cmd->add_option("--workers", args.workers, "worker thread count (results are invariant to it)")
      ->check(CLI::PositiveNumber);
}

Experiment load(const CommonArgs& args) {
  Experiment exp = load_experiment(args.config_path);
  if (args.seed) exp.run.seed = *args.seed;
  exp.run.workers = args.workers;
  if (!args.out_dir.empty()) fs::create_directories(args.out_dir);
  return exp;
}

std::ofstream open_out(const CommonArgs& args, const std::string& name) {
  const fs::path path = fs::path(args.out_dir) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string theta_header(Index p, const std::string& prefix) {
  std::string h;
  for (Index i = 0; i < p; ++i) h += "," + prefix + std::to_string(i);
  return h;
}

struct StudyCsv {
  // study.csv row serialization; the resume path re-reads these rows, so the
  // aggregate inputs are exactly the 9-significant-digit on-disk values.
  static std::string header(Index p, const std::vector<int>& checkpoints) {
    std::string h = "replicate,flagged,lambda";
    h += theta_header(p, "theta");
    h += theta_header(p, "var");
    h += theta_header(p, "wald_hit");
    h += theta_header(p, "ptb_hit");
    h += ",reg_cost,boot_flagged";
    for (int t : checkpoints) h += ",regret_t" + std::to_string(t);
    return h;
  }

  static std::string row(const ReplicateRow& r) {
    std::ostringstream os;
    os << r.index << ',' << (r.flagged ? 1 : 0) << ',' << fmt9(r.lambda_hat);
    for (Index i = 0; i < r.theta_hat.size(); ++i) os << ',' << fmt9(r.theta_hat(i));
    for (Index i = 0; i < r.plugin_var.size(); ++i) os << ',' << fmt9(r.plugin_var(i));
    for (int h : r.wald_hit) os << ',' << h;
    for (int h : r.ptb_hit) os << ',' << h;
    os << ',' << fmt9(r.reg_cost) << ',' << r.boot_flagged;
    for (double v : r.cum_regret) os << ',' << fmt9(v);
    return os.str();
  }

  static ReplicateRow parse_row(const std::string& line, Index p, size_t n_checkpoints) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) cells.push_back(cell);
    const size_t expected = 2 + 1 + 4 * static_cast<size_t>(p) + 2 + n_checkpoints;
    if (cells.size() != expected) {
      throw std::runtime_error("study.csv: malformed row (expected " + std::to_string(expected) +
                               " cells, got " + std::to_string(cells.size()) + ")");
    }
    ReplicateRow r;
    size_t c = 0;
    r.index = std::stoi(cells[c++]);
    r.flagged = cells[c++] == "1";
    r.lambda_hat = std::stod(cells[c++]);
    r.theta_hat = Vec::Zero(p);
    r.plugin_var = Vec::Zero(p);
    for (Index i = 0; i < p; ++i) r.theta_hat(i) = std::stod(cells[c++]);
    for (Index i = 0; i < p; ++i) r.plugin_var(i) = std::stod(cells[c++]);
    for (Index i = 0; i < p; ++i) r.wald_hit.push_back(std::stoi(cells[c++]));
    for (Index i = 0; i < p; ++i) r.ptb_hit.push_back(std::stoi(cells[c++]));
    r.reg_cost = std::stod(cells[c++]);
    r.boot_flagged = std::stoi(cells[c++]);
    for (size_t j = 0; j < n_checkpoints; ++j) r.cum_regret.push_back(std::stod(cells[c++]));
    return r;
  }
};

int cmd_run(const CommonArgs& args) {
  const Experiment exp = load(args);
  const FeatureMaps maps = exp.env.features();
  const Index p = maps.p();

  Rng rng = Rng::replicate_stream(exp.run.seed, 0);
  const TrajectoryResult run = run_trajectory(exp.env, exp.run, rng);

  auto traj = open_out(args, "trajectory.csv");
  traj << "t";
  for (Index i = 0; i < exp.env.context_dim(); ++i) traj << ",s" << (i + 1);
  traj << ",action,outcome" << theta_header(p, "theta") << ",lambda\n";
  for (size_t t = 0; t < run.history.size(); ++t) {
    const auto& rec = run.history[t];
    traj << (t + 1);
    for (Index i = 0; i < rec.context.size(); ++i) traj << ',' << fmt9(rec.context(i));
    traj << ',' << rec.action << ',' << fmt9(run.outcomes[t]);
    const int upd = static_cast<int>(t) + 1 - run.first_update;
    if (upd >= 0) {
      const Vec& th = run.theta_path[static_cast<size_t>(upd)];
      for (Index i = 0; i < p; ++i) traj << ',' << fmt9(th(i));
      traj << ',' << fmt9(run.lambda_path[static_cast<size_t>(upd)]);
    } else {
      for (Index i = 0; i < p; ++i) traj << ",0";
      traj << ",0";
    }
    traj << '\n';
  }

  auto summary = open_out(args, "summary.csv");
  summary << "T,burn_in,seed,flagged,lambda" << theta_header(p, "theta") << ",sigma2"
          << theta_header(p, "var") << '\n';
  summary << exp.run.T << ',' << exp.run.burn_in << ',' << exp.run.seed << ','
          << (run.flagged ? 1 : 0) << ',' << fmt9(run.lambda_final);
  for (Index i = 0; i < p; ++i) summary << ',' << fmt9(run.theta_final(i));
  try {
    std::vector<Vec> contexts;
    for (const auto& rec : run.history) contexts.push_back(rec.context);
    const double s2 = sigma2_hat(residuals(run.critic, run.history, maps), maps.k());
    const Mat cov = actor_covariance(run.critic.mu_hat(), run.theta_final, contexts, maps,
                                     run.lambda_final, s2);
    summary << ',' << fmt9(s2);
    for (Index i = 0; i < p; ++i) summary << ',' << fmt9(cov.diagonal()(i));
  } catch (const std::exception&) {
    summary << ",nan";
    for (Index i = 0; i < p; ++i) summary << ",nan";
  }
  summary << '\n';
  return run.flagged ? 3 : 0;
}

std::pair<Vec, double> resolve_theta_star(const Experiment& exp, std::string& source) {
  if (exp.oracle.pinned) {
    source = "pinned";
    return {exp.oracle.theta_star, exp.oracle.lambda_star};
  }
  source = "computed";
  const OracleResult res = oracle_policy(exp.env, exp.run.p0, exp.run.alpha, exp.run.seed);
  if (!res.feasible) throw inference_error("oracle: constraint unsatisfiable at lambda_max");
  return {res.theta_star, res.lambda_star};
}

int cmd_study(const CommonArgs& args, std::optional<int> replicates, bool resume) {
  Experiment exp = load(args);
  if (replicates) exp.run.replicate_count = *replicates;
  exp.run.validate();
  const Index p = exp.env.features().p();

  std::string source;
  const auto [theta_star, lambda_star] = resolve_theta_star(exp, source);

  std::vector<int> checkpoints;
  for (int j = 1; j <= 10; ++j) {
    const int t = exp.run.T * j / 10;
    if (t >= 1 && (checkpoints.empty() || checkpoints.back() != t)) checkpoints.push_back(t);
  }

  StudyReport report;
  const fs::path study_path = fs::path(args.out_dir) / "study.csv";
  if (resume && fs::exists(study_path)) {
    // Re-read finished rows, compute only the missing replicates.
    std::ifstream in(study_path);
    std::string line;
    std::getline(in, line);  // header
    std::map<int, ReplicateRow> have;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      ReplicateRow r = StudyCsv::parse_row(line, p, checkpoints.size());
      have.emplace(r.index, std::move(r));
    }
    report.theta_star = theta_star;
    report.lambda_star = lambda_star;
    report.regret_checkpoints = checkpoints;
    report.rows.resize(static_cast<size_t>(exp.run.replicate_count));
    std::vector<int> missing;
    for (int i = 0; i < exp.run.replicate_count; ++i) {
      const auto it = have.find(i);
      if (it != have.end()) {
        report.rows[static_cast<size_t>(i)] = it->second;
      } else {
        missing.push_back(i);
      }
    }
    if (!missing.empty()) {
      parallel_for(static_cast<int>(missing.size()), exp.run.workers, [&](int j) {
        const int rep = missing[static_cast<size_t>(j)];
        report.rows[static_cast<size_t>(rep)] =
            study_replicate_row(exp.env, exp.run, theta_star, lambda_star, rep);
      });
    }
    report.agg = aggregate_rows(report.rows, theta_star);
  } else {
    report = replicate_study(exp.env, exp.run, theta_star, lambda_star);
  }

  auto study = open_out(args, "study.csv");
  study << StudyCsv::header(p, checkpoints) << '\n';
  for (const auto& row : report.rows) study << StudyCsv::row(row) << '\n';

  auto agg = open_out(args, "aggregates.csv");
  agg << "metric" << theta_header(p, "theta") << '\n';
  auto write_metric = [&](const char* name, const Vec& v) {
    agg << name;
    for (Index i = 0; i < p; ++i) agg << ',' << fmt9(v(i));
    agg << '\n';
  };
  write_metric("bias", report.agg.bias);
  write_metric("mse", report.agg.mse);
  write_metric("coverage_wald", report.agg.coverage_wald);
  write_metric("coverage_ptb", report.agg.coverage_ptb);
  write_metric("mean_plugin_var", report.agg.mean_plugin_var);

  auto meta = open_out(args, "meta.csv");
  meta << "key,value\n";
  meta << "replicates," << exp.run.replicate_count << '\n';
  meta << "used," << report.agg.used << '\n';
  meta << "flagged," << report.agg.flagged << '\n';
  meta << "T," << exp.run.T << '\n';
  meta << "seed," << exp.run.seed << '\n';
  meta << "mean_reg_cost," << fmt9(report.agg.mean_reg_cost) << '\n';
  meta << "theta_star_source," << source << '\n';
  for (Index i = 0; i < p; ++i) meta << "theta_star" << i << ',' << fmt9(theta_star(i)) << '\n';
  meta << "lambda_star," << fmt9(lambda_star) << '\n';

  if (!report.mean_cum_regret.empty()) {
    auto regret = open_out(args, "regret.csv");
    regret << "t,mean_cum_regret\n";
    for (size_t j = 0; j < report.regret_checkpoints.size(); ++j) {
      regret << report.regret_checkpoints[j] << ',' << fmt9(report.mean_cum_regret[j]) << '\n';
    }
  }
  return 0;
}

int cmd_oracle(const CommonArgs& args) {
  const Experiment exp = load(args);
  const OracleResult res = oracle_policy(exp.env, exp.run.p0, exp.run.alpha, exp.run.seed);
  const Index p = exp.env.features().p();
  auto out = open_out(args, "oracle.csv");
  out << "lambda_star" << theta_header(p, "theta") << ",constraint_value,budget,mc_size,feasible\n";
  out << fmt9(res.lambda_star);
  for (Index i = 0; i < p; ++i) out << ',' << fmt9(res.theta_star(i));
  out << ',' << fmt9(res.constraint) << ',' << fmt9(res.budget) << ',' << res.mc_size << ','
      << (res.feasible ? 1 : 0) << '\n';
  if (!res.feasible) {
    std::cerr << "oracle: constraint unsatisfiable even at lambda_max\n";
    return 3;
  }
  return 0;
}

int cmd_myopic(const CommonArgs& args) {
  const Experiment exp = load(args);
  const MyopicResult res = myopic_equilibrium(exp.env, exp.run.p0, exp.run.alpha, exp.run.seed);
  const Index p = exp.env.features().p();
  auto out = open_out(args, "myopic.csv");
  out << "sweeps,lambda" << theta_header(p, "theta") << '\n';
  out << res.sweeps << ',' << fmt9(res.lambda_eq);
  for (Index i = 0; i < p; ++i) out << ',' << fmt9(res.theta_eq(i));
  out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochasticity-constrained actor-critic contextual bandit simulator"};
  app.require_subcommand(1);

  CommonArgs run_args, study_args, oracle_args, myopic_args;
  std::optional<int> replicates;
  bool resume = false;

  add_common(app.add_subcommand("run", "run one online trajectory"), run_args);
  CLI::App* study = app.add_subcommand("study", "replicate study with inference aggregates");
  add_common(study, study_args);
  study->add_option("--replicates", replicates, "override run.replicates");
  study->add_flag("--resume", resume, "reuse finished rows from an existing study.csv");
  add_common(app.add_subcommand("oracle", "population oracle (lambda*, theta*)"), oracle_args);
  add_common(app.add_subcommand("myopic", "myopic equilibrium policy"), myopic_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("run")) return cmd_run(run_args);
    if (app.got_subcommand("study")) return cmd_study(study_args, replicates, resume);
    if (app.got_subcommand("oracle")) return cmd_oracle(oracle_args);
    if (app.got_subcommand("myopic")) return cmd_myopic(myopic_args);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
