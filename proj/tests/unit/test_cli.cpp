#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "pdesym/solution.hpp"

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  int code = pdesym::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string prob(const std::string& name) { return std::string(PDESYM_CORPUS_DIR) + "/" + name + ".prob"; }

bool has(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST(Cli, Usage) {
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"frobnicate"}).code, 1);
  CliRun help = cli({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_TRUE(has(help.out, "solve"));
  CliRun missing = cli({"solve"});
  EXPECT_EQ(missing.code, 1);
  EXPECT_TRUE(has(missing.err, "Expression grammar"));
  EXPECT_EQ(cli({"solve", "/nonexistent.prob"}).code, 1);
}

TEST(Cli, Solve) {
  CliRun r = cli({"solve", prob("heat_exp"), "--no-timing"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(has(r.out, "solution: A*exp(x + a*t)"));
  EXPECT_TRUE(has(r.out, "\"expression_sexp\""));
  CliRun tiny = cli({"solve", prob("heat_exp"), "--budget", "3"});
  EXPECT_EQ(tiny.code, 2);
  EXPECT_TRUE(has(tiny.out, "budget_exhausted"));
}

TEST(Cli, SolveWritesJson) {
  auto path = std::filesystem::temp_directory_path() / "pdesym_cli_solution.json";
  CliRun r = cli({"solve", prob("helmholtz_burgers_exp_ic"), "--no-timing", "--out", path.string()});
  ASSERT_EQ(r.code, 0);
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  pdesym::SolutionRecord rec = pdesym::import_solution(buf.str());
  EXPECT_EQ(rec.name, "helmholtz_burgers_exp_ic");
  CliRun again = cli({"verify", prob("helmholtz_burgers_exp_ic"), "--record", path.string()});
  EXPECT_EQ(again.code, 0) << again.out;
  std::filesystem::remove(path);
}

TEST(Cli, Verify) {
  CliRun ok = cli({"verify", prob("heat_exp"), "--candidate", "exp(x + a*t)"});
  EXPECT_EQ(ok.code, 0);
  EXPECT_TRUE(has(ok.out, "fitness: 0"));
  CliRun bad = cli({"verify", prob("heat_exp"), "--candidate", "exp(x + 2*a*t)"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_TRUE(has(bad.out, "WitnessNonzero"));
  EXPECT_TRUE(has(bad.out, "residual: "));
  CliRun syntax = cli({"verify", prob("heat_exp"), "--candidate", "exp(x"});
  EXPECT_EQ(syntax.code, 1);
  EXPECT_TRUE(has(syntax.err, "offset 5"));
  EXPECT_TRUE(has(syntax.err, "Expression grammar"));
  EXPECT_EQ(cli({"verify", prob("heat_exp")}).code, 1);
  EXPECT_EQ(cli({"verify", prob("heat_exp"), "--candidate", "u_x"}).code, 1);
}

TEST(Cli, Equiv) {
  CliRun same = cli({"equiv", prob("heat_poly"), "--a", "A + B*x^2 + 2*B*a*t", "--b", "A*(x^2 + 2*a*t) + B"});
  EXPECT_EQ(same.code, 0);
  EXPECT_EQ(same.out, "Equivalent\n");
  CliRun diff = cli({"equiv", prob("heat_poly"), "--a", "A*x^2", "--b", "exp(x)"});
  EXPECT_EQ(diff.code, 2);
  EXPECT_EQ(diff.out, "Distinct\n");
}

TEST(Cli, Bench) {
  auto csv = std::filesystem::temp_directory_path() / "pdesym_cli_bench.csv";
  auto json = std::filesystem::temp_directory_path() / "pdesym_cli_bench.json";
  CliRun r = cli({"bench", PDESYM_CORPUS_DIR, "--report", csv.string(), "--json", json.string(), "--jobs", "2",
               "--no-timing"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(has(r.out, "8/8 problems solved"));
  EXPECT_TRUE(std::filesystem::exists(csv));
  EXPECT_TRUE(std::filesystem::exists(json));
  std::filesystem::remove(csv);
  std::filesystem::remove(json);
  EXPECT_EQ(cli({"bench", PDESYM_CORPUS_DIR, "--jobs", "0"}).code, 1);
}
