#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(PESTOV_LAB_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kDir = PESTOV_TEST_DIR;

}  // namespace

TEST_CASE("missing or unknown suites are usage errors") {
  CHECK(run("check") == 2);
  CHECK(run("check nonsense") == 2);
  CHECK(run("") == 2);
  CHECK(run("check pointwise --k two") == 2);
}

TEST_CASE("pointwise run succeeds and writes a report") {
  const std::string path = kDir + "/cli_pointwise.json";
  CHECK(run("check pointwise --manifold sphere:2 --k 1 --seed 7 --report " + path) == 0);
  const std::string text = slurp(path);
  CHECK(text.find("\"identity_id\": \"PESTOV\"") != std::string::npos);
  CHECK(text.find("\"convergence_order\"") != std::string::npos);
}

TEST_CASE("config files are read and flags take precedence") {
  const std::string cfg = kDir + "/cli.cfg";
  std::ofstream(cfg) << "manifold = torus:2\nk = 2\npairs = 1\nseed = 3\n";
  const std::string a = kDir + "/cli_cfg_a.json";
  const std::string b = kDir + "/cli_cfg_b.json";
  CHECK(run("check --suite pointwise --config " + cfg + " --report " + a) == 0);
  CHECK(run("check pointwise --config " + cfg + " --manifold sphere:2 --report " + b) == 0);
  CHECK(slurp(a).find("\"manifold\": \"torus:2\"") != std::string::npos);
  CHECK(slurp(b).find("\"manifold\": \"sphere:2\"") != std::string::npos);
  CHECK(slurp(b).find("\"pairs\": 1") != std::string::npos);
}

TEST_CASE("identical seeds give identical reports") {
  const std::string a = kDir + "/cli_det_a.json";
  const std::string b = kDir + "/cli_det_b.json";
  const std::string args = "check integrated --manifold torus:2 --k 2 --samples 500 --seed 5 ";
  CHECK(run(args + "--report " + a) == 0);
  CHECK(run(args + "--threads 2 --report " + b) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK_FALSE(slurp(a).empty());
}
