#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

std::string cli_path() { return FROSTMAN_CLI_PATH; }

int run(const std::string& args) {
  std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("frostman_cli_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kSmallSchedule = "--preset dim-epsilon --N 4 --eps 0.5 --d 1 --K 4";

}  // namespace

TEST_CASE("generate writes tree files, counts CSV and a manifest") {
  fs::path out = fresh_dir("gen");
  int rc = run("--out " + out.string() + " generate " + kSmallSchedule +
               " --seeds 0..4 --pin-origin");
  CHECK(rc == 0);
  for (int s = 0; s < 5; ++s) CHECK(fs::exists(out / ("tree_" + std::to_string(s) + ".json")));
  CHECK(fs::exists(out / "counts.csv"));
  CHECK(fs::exists(out / "manifest.json"));
  std::string counts = slurp(out / "counts.csv");
  CHECK(counts.rfind("seed,k,P_k", 0) == 0);
}

TEST_CASE("identical configs produce byte-identical artifacts") {
  fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
  std::string args = " generate " + kSmallSchedule + " --seeds 0..2";
  REQUIRE(run("--out " + a.string() + args) == 0);
  REQUIRE(run("--out " + b.string() + args) == 0);
  CHECK(slurp(a / "counts.csv") == slurp(b / "counts.csv"));
  CHECK(slurp(a / "tree_0.json") == slurp(b / "tree_0.json"));
  CHECK(slurp(a / "tree_2.json") == slurp(b / "tree_2.json"));
}

TEST_CASE("manifest config hash tracks semantic config changes") {
  fs::path a = fresh_dir("hash_a"), b = fresh_dir("hash_b"), c = fresh_dir("hash_c");
  REQUIRE(run("--out " + a.string() + " generate " + kSmallSchedule + " --seeds 0..2") == 0);
  REQUIRE(run("--out " + b.string() + " generate " + kSmallSchedule + " --seeds 0..2") == 0);
  REQUIRE(run("--out " + c.string() + " generate " + kSmallSchedule + " --seeds 0..3") == 0);
  auto hash_line = [](const std::string& manifest) {
    size_t pos = manifest.find("config_hash");
    REQUIRE(pos != std::string::npos);
    return manifest.substr(pos, manifest.find('\n', pos) - pos);
  };
  CHECK(hash_line(slurp(a / "manifest.json")) == hash_line(slurp(b / "manifest.json")));
  CHECK(hash_line(slurp(a / "manifest.json")) != hash_line(slurp(c / "manifest.json")));
}

TEST_CASE("exponents command emits the exact-rational table") {
  fs::path out = fresh_dir("exp");
  int rc = run("--out " + out.string() + " exponents --n 2 --d 1 --eps 1/2 --p 2,4,6,8,inf");
  CHECK(run("exponents --n 2 --d 1 --eps 0.5 --p 4") == 2);  // decimals rejected, use 1/2
  CHECK(rc == 0);
  std::string csv = slurp(out / "exponents.csv");
  CHECK(csv.rfind("n,d,epsilon,p,sogge,bgt,theta,vartheta,kappa,p0,p_star", 0) == 0);
  // p = 8 row: sogge 1/4, bgt 3/8, theta = vartheta = kappa = 7/16, kinks at 2.
  CHECK(csv.find("2,1,1/2,8,1/4,3/8,7/16,7/16,7/16,2,2,") != std::string::npos);
  // p = inf row: 1/p = 0 everywhere, theta = 1/2.
  CHECK(csv.find("2,1,1/2,inf,1/2,1/2,1/2,1/2,1/2,2,2,") != std::string::npos);
}

TEST_CASE("dimension summary lands near the target dimension") {
  fs::path out = fresh_dir("dim");
  REQUIRE(run("--out " + out.string() + " dimension " + kSmallSchedule + " --seeds 0..9") == 0);
  std::string sum = slurp(out / "dimension_summary.csv");
  // second line: mean_estimate,reference,count_only
  std::istringstream ss(sum);
  std::string header, line;
  std::getline(ss, header);
  std::getline(ss, line);
  double mean = std::stod(line);
  CHECK(std::abs(mean - 0.5) <= 0.2);  // K = 4 is coarse; the acceptance run uses K = 6
}

TEST_CASE("config errors exit 2") {
  // N = 2 with eps = 0.5 forces p_1 = 2^(-1/2) > 1/2: invalid schedule.
  CHECK(run("generate --preset dim-epsilon --N 2 --eps 0.5 --d 1 --K 3 --seeds 0") == 2);
  CHECK(run("exponents --n 2 --d 1 --eps 0.5 --p 1") == 2);  // p < 2
}

TEST_CASE("resolution-gate violations exit 3") {
  fs::path out = fresh_dir("gate3");
  // Stage-2 atomization (delta = 2^-6) cannot resolve degrees up to 512.
  int rc = run("--out " + out.string() + " sphere --preset dim-epsilon --N 4 --eps 0.5 --d 1" +
               " --K 2 --kind zonal --arc cantor --l 16:512:1 --p 8");
  CHECK(rc == 3);
}

TEST_CASE("failed acceptance gate exits 1 and records the gate in the manifest") {
  fs::path out = fresh_dir("gate1");
  int rc = run("--out " + out.string() + " kernel " + kSmallSchedule +
               " --n 2 --alpha 0.5 --p 8 --lambda 16:256:1 --tol 0.000001");
  CHECK(rc == 1);
  std::string man = slurp(out / "manifest.json");
  CHECK(man.find("\"slope_within_tol\": false") != std::string::npos);
}
