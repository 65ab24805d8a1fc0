#include <doctest.h>

#include "kpoisson/cli.hpp"

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(KPOISSON_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::string out;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

Run shell(const std::string& script) {
  FILE* pipe = popen(script.c_str(), "r");
  REQUIRE(pipe);
  std::string out;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

double metric(const std::string& csv, const std::string& name) {
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(name + ",", 0) == 0) return std::stod(line.substr(name.size() + 1));
  }
  FAIL("metric " << name << " missing");
  return 0.0;
}

std::filesystem::path scratch() {
  const auto dir = std::filesystem::temp_directory_path() / "kpoisson_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit with 1") {
    CHECK(run("").code == 1);
    CHECK(run("fit").code == 1);
    CHECK(run("frobnicate").code == 1);
    CHECK(run("fit --input x.csv --bogus").code == 1);
    CHECK(run("simulate --family nope").code == 1);
    CHECK(run("reproduce nothing").code == 1);
    CHECK(run("--help").code == 0);
  }

  TEST_CASE("runtime errors exit with 2") {
    CHECK(run("fit --input /nonexistent/points.csv").code == 2);
    CHECK(run("predict --model /nonexistent/model.txt --query /nonexistent/q.csv").code == 2);
  }

  TEST_CASE("in-process entry point") {
    std::array<char*, 2> argv{const_cast<char*>("kpoisson"), const_cast<char*>("fit")};
    CHECK(kpoisson::cli_main(2, argv.data()) == 1);
  }

  TEST_CASE("reproduce sobolev prints four RMSEs") {
    const Run r = run("reproduce sobolev");
    CHECK(r.code == 0);
    CHECK(metric(r.out, "rmse_grid10") > 0.0);
    CHECK(metric(r.out, "rmse_grid100") > 0.0);
    CHECK(metric(r.out, "rmse_beta400") > 0.0);
    CHECK(metric(r.out, "rmse_rank5") > 0.0);
  }

  TEST_CASE("fit, predict and score") {
    const auto dir = scratch();
    const std::string pattern = (dir / "p.csv").string(), model = (dir / "m.txt").string();
    REQUIRE(run("simulate --family gauss-mix --dim 2 --seed 3 --out " + pattern).code == 0);
    REQUIRE(run("fit -i " + pattern + " --kernel 'se(sigma=0.2)' --landmarks 100 --landmark-strategy halton-qmc --rank 50 --seed 1 -o " + model).code == 0);
    {
      std::ofstream q(dir / "q.csv");
      q << "x0,x1\n0.5,0.5\n0.1,0.9\n";
    }
    const Run pred = run("predict -m " + model + " -q " + (dir / "q.csv").string());
    CHECK(pred.code == 0);
    CHECK(pred.out.rfind("x0,x1,lambda\n", 0) == 0);
    {
      std::ofstream q(dir / "bad.csv");
      q << "0.5,1.5\n";
    }
    CHECK(run("predict -m " + model + " -q " + (dir / "bad.csv").string()).code == 2);
    const Run sc = run("score -m " + model + " --pattern " + pattern);
    CHECK(sc.code == 0);
    CHECK(std::isfinite(metric(sc.out, "log_likelihood")));
    const std::string primal_model = (dir / "mp.txt").string();
    REQUIRE(run("fit -i " + pattern + " --kernel 'se(sigma=0.2)' --landmarks 100 --landmark-strategy halton-qmc --rank 50 --seed 1 --primal -o " + primal_model).code == 0);
    const Run sp = run("score -m " + primal_model + " --pattern " + pattern);
    CHECK(sp.code == 0);
    CHECK(std::isfinite(metric(sp.out, "log_likelihood")));
    const Run kie = run("fit -i " + pattern + " --method kie --bandwidth 0.05 --edge-correct");
    CHECK(kie.code == 0);
    CHECK(kie.out.find("type kie") != std::string::npos);
    const Run spectrum = shell(std::string(KPOISSON_CLI) + " fit -i " + pattern +
                               " --kernel 'tensor(sobolev(s=1)@[0], sobolev(s=1)@[1])' --rep mercer --truncation 5 "
                               "--report-spectrum 2>&1 >/dev/null");
    CHECK(spectrum.code == 0);
    CHECK(spectrum.out.find("tail_bound") != std::string::npos);
  }

  TEST_CASE("cv emits a score table") {
    const auto dir = scratch();
    const std::string pattern = (dir / "h.csv").string();
    REQUIRE(run("simulate --family homog --rate 80 --seed 5 --out " + pattern).code == 0);
    {
      std::ofstream g(dir / "grid.txt");
      g << "bandwidth=0.05,0.1,0.2\n";
    }
    const Run r = run("cv -i " + pattern + " --method kie --grid " + (dir / "grid.txt").string() + " --folds 3 --seed 2");
    CHECK(r.code == 0);
    CHECK(r.out.rfind("assignment,score,selected\n", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 4);
    CHECK(run("cv -i " + pattern + " --method kie --no-thinning-correction --folds 3").code == 0);
  }

  TEST_CASE("simulate | cv | score recovers a homogeneous intensity") {
    const auto dir = scratch();
    const std::string truth = (dir / "truth.csv").string(), model = (dir / "hm.txt").string();
    const std::string cli = KPOISSON_CLI;
    const Run r = shell(cli + " simulate --family homog --rate 400 --seed 11 --intensity-out " + truth + " | " + cli +
                        " cv -i - --kernel 'sobolev(s=1)' --rep mercer --seed 1 --model-out " + model +
                        " >/dev/null 2>&1 && " + cli + " score -m " + model + " --truth " + truth);
    REQUIRE(r.code == 0);
    CHECK(metric(r.out, "interior_mean_relative_error") <= 0.15);
  }
}
