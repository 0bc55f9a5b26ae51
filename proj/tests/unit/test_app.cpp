#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ssde/app.hpp"

using namespace ssde;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("ssde_test_" + name)) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::size_t line_count(const fs::path& p) {
  const std::string s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

RunConfig config_for(const std::string& text, const fs::path& out) {
  RunConfig c = parse_config(text);
  c.out = out.string();
  return c;
}

}  // namespace

TEST_CASE("simulate-spectral writes one CSV per path") {
  TempDir d("spectral");
  const RunConfig c = config_for(
      "[model]\nmodel = dyson\nbeta = 1\np = 2\n[scheme]\ndt = 1e-3\nT = 1\n[run]\nseed = 42\npaths = 3\nnoise_dump = true\n",
      d.path);
  std::ostringstream log;
  REQUIRE(run(c, log, true) == kExitPass);
  for (const char* name : {"spectral_0.csv", "spectral_1.csv", "spectral_2.csv"})
    CHECK(line_count(d.path / name) == 1002);
  CHECK(fs::exists(d.path / "noise_2.bin"));
  CHECK(fs::exists(d.path / "events.jsonl"));
  const auto m = nlohmann::json::parse(slurp(d.path / "manifest.json"));
  CHECK(m["seed"] == 42);
  CHECK(m["exit_code"] == 0);
  CHECK(m["artifacts"].size() == 7);
  CHECK(m["command"] == "simulate-spectral");
}

TEST_CASE("reruns are byte-identical") {
  TempDir a("rerun_a"), b("rerun_b");
  const std::string text =
      "command = simulate-matrix\n[model]\nmodel = wishart\nalpha = 3\np = 2\n[scheme]\ndt = 1e-3\nT = 0.1\n"
      "[run]\nseed = 9\npaths = 4\nworkers = 2\n";
  std::ostringstream log;
  REQUIRE(run(config_for(text, a.path), log, true) == kExitPass);
  REQUIRE(run(config_for(text, b.path), log, true) == kExitPass);
  for (const char* name : {"matrix_0.csv", "matrix_3.csv", "matrix_2_eigenvalues.csv", "events.jsonl"})
    CHECK(slurp(a.path / name) == slurp(b.path / name));
  CHECK(line_count(a.path / "matrix_0.csv") == 102);
}

TEST_CASE("verify exit codes") {
  std::ostringstream log;
  {
    TempDir d("verify_pass");
    const RunConfig c = config_for(
        "command = verify-collision\n[model]\nmodel = dyson\nbeta = 1.5\np = 2\n[scheme]\ndt = 1e-3\nT = 1\nmax_halvings = 50\n"
        "[init]\nlambda0 = 0, 0.1\n[run]\nseed = 42\npaths = 20\n",
        d.path);
    CHECK(run(c, log, true) == kExitPass);
    CHECK(fs::exists(d.path / "report.json"));
    CHECK(fs::exists(d.path / "report.txt"));
    const auto rep = nlohmann::json::parse(slurp(d.path / "report.json"));
    CHECK(rep["passed"] == true);
  }
  {
    // An unreachable collision fraction makes the verdict fail.
    TempDir d("verify_fail");
    const RunConfig c = config_for(
        "command = verify-collision\n[model]\nmodel = dyson\nbeta = 0.5\np = 2\n[scheme]\ndt = 1e-3\nT = 0.01\n"
        "[run]\nseed = 42\npaths = 5\n[verify]\nmin_collision_fraction = 0.99\n",
        d.path);
    CHECK(run(c, log, true) == kExitFail);
    const auto m = nlohmann::json::parse(slurp(d.path / "manifest.json"));
    CHECK(m["passed"] == false);
  }
  {
    TempDir d("verify_error");
    RunConfig c = config_for("[model]\nmodel = dyson\np = 2\n[run]\nseed = 1\n", d.path);
    c.scheme.T = 1.0;
    c.scheme.dt = 0.3;  // not a divisor of T; rejected at run time
    CHECK(run(c, log, true) == kExitError);
    const auto m = nlohmann::json::parse(slurp(d.path / "manifest.json"));
    CHECK(m["exit_code"] == 2);
    CHECK(m.contains("error"));
  }
}

TEST_CASE("seed precedence") {
  RunConfig c;
  CHECK(resolve_seed(std::nullopt, c, nullptr) == 0);
  CHECK(resolve_seed(std::nullopt, c, "17") == 17);
  c.seed = 5;
  CHECK(resolve_seed(std::nullopt, c, "17") == 5);
  CHECK(resolve_seed(3, c, "17") == 3);
  c.seed.reset();
  CHECK_THROWS(resolve_seed(std::nullopt, c, "-4"));
  CHECK_THROWS(resolve_seed(std::nullopt, c, "12abc"));
}
