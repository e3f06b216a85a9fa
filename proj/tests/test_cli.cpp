#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ACB_BIN) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

struct TempDir {
  fs::path path;
  TempDir(const char* tag) : path(fs::temp_directory_path() / (std::string("acbtest_") + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_config(const fs::path& p, const std::string& body) {
  std::ofstream out(p);
  out << body;
}

const char* kIidSmall = R"([env]
kind = iid
[constraint]
lambda_mode = online
[run]
T = 40
burn_in = 20
clip = false
seed = 11
replicates = 2
[inference]
bootstrap_B = 3
[oracle]
pinned = true
lambda_star = 0.046875
theta_star = 0.417778 0.394811 0.389474 0.001068
)";

}  // namespace

TEST_CASE("cli run writes trajectory and summary, deterministically") {
  TempDir dir("run");
  write_config(dir.path / "exp.cfg", kIidSmall);
  const std::string cfg = (dir.path / "exp.cfg").string();

  REQUIRE(run_cli("run " + cfg + " --seed 5 --out " + (dir.path / "a").string()) == 0);
  const std::string traj = slurp(dir.path / "a" / "trajectory.csv");
  CHECK(count_lines(traj) == 41);  // header + T rows
  CHECK(traj.rfind("t,s1,s2,s3,action,outcome,theta0,theta1,theta2,theta3,lambda", 0) == 0);

  REQUIRE(run_cli("run " + cfg + " --seed 5 --out " + (dir.path / "b").string()) == 0);
  CHECK(slurp(dir.path / "b" / "trajectory.csv") == traj);
  CHECK(slurp(dir.path / "a" / "summary.csv") == slurp(dir.path / "b" / "summary.csv"));

  // a different seed changes the trajectory
  REQUIRE(run_cli("run " + cfg + " --seed 6 --out " + (dir.path / "c").string()) == 0);
  CHECK(slurp(dir.path / "c" / "trajectory.csv") != traj);
}

TEST_CASE("cli rejects bad configs with a nonzero exit naming the key") {
  TempDir dir("badcfg");
  write_config(dir.path / "bad.cfg", "[env]\nkind = iid\n[run]\nT = 10\nburn_in = 20\n");
  const std::string out = (dir.path / "out").string();
  const std::string cmd = std::string(ACB_BIN) + " run " + (dir.path / "bad.cfg").string() +
                          " --out " + out + " 2> " + (dir.path / "err.txt").string();
  const int status = WEXITSTATUS(std::system(cmd.c_str()));
  CHECK(status == 1);
  CHECK(slurp(dir.path / "err.txt").find("run.T") != std::string::npos);
}

TEST_CASE("cli study writes per-replicate rows and aggregates; resume is identical") {
  TempDir dir("study");
  write_config(dir.path / "exp.cfg", kIidSmall);
  const std::string cfg = (dir.path / "exp.cfg").string();

  const std::string full = (dir.path / "full").string();
  REQUIRE(run_cli("study " + cfg + " --out " + full) == 0);
  const std::string study = slurp(dir.path / "full" / "study.csv");
  CHECK(count_lines(study) == 3);  // header + 2 replicates
  CHECK(count_lines(slurp(dir.path / "full" / "aggregates.csv")) == 6);

  // --replicates overrides the config
  const std::string three = (dir.path / "three").string();
  REQUIRE(run_cli("study " + cfg + " --replicates 3 --out " + three) == 0);
  CHECK(count_lines(slurp(dir.path / "three" / "study.csv")) == 4);

  // interrupt-and-resume: seed the out dir with the 2-replicate table, then
  // resume to 3; everything must match the fresh 3-replicate run
  const std::string resumed = (dir.path / "resumed").string();
  fs::create_directories(resumed);
  fs::copy_file(dir.path / "full" / "study.csv", fs::path(resumed) / "study.csv");
  REQUIRE(run_cli("study " + cfg + " --replicates 3 --resume --out " + resumed) == 0);
  CHECK(slurp(fs::path(resumed) / "study.csv") == slurp(dir.path / "three" / "study.csv"));
  CHECK(slurp(fs::path(resumed) / "aggregates.csv") ==
        slurp(dir.path / "three" / "aggregates.csv"));
}

TEST_CASE("cli oracle and myopic on the binary-context model") {
  TempDir dir("oracle");
  write_config(dir.path / "toy.cfg",
               "[env]\nkind = toy_binary\n[run]\nT = 100\nseed = 3\n");
  const std::string cfg = (dir.path / "toy.cfg").string();
  REQUIRE(run_cli("oracle " + cfg + " --out " + (dir.path / "o").string()) == 0);
  const std::string oracle = slurp(dir.path / "o" / "oracle.csv");
  CHECK(oracle.rfind("lambda_star,theta0,theta1,constraint_value,budget,mc_size,feasible", 0) == 0);
  REQUIRE(run_cli("myopic " + cfg + " --out " + (dir.path / "m").string()) == 0);
  CHECK(slurp(dir.path / "m" / "myopic.csv").rfind("sweeps,lambda,theta0,theta1", 0) == 0);
}
