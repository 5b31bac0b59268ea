#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "pdesym/errors.hpp"
#include "pdesym/format.hpp"
#include "pdesym/parser.hpp"
#include "pdesym/problem.hpp"
#include "pdesym/solution.hpp"

using namespace pdesym;

namespace {

const char* kHeat = R"(# heat equation
name = heat
unknown = u(x,t)
pde = u_t - a*u_xx = 0
coefficients = a
time = t
ic = exp(x)
ref = A:1, B:1/2
budget = 5000
max_insertions = 2
)";

std::string with(const std::string& extra) { return std::string(kHeat) + extra + "\n"; }

}  // namespace

TEST(Problem, ParsesAllKeys) {
  PdeProblem p = parse_problem(with("expected = exp(x + a*t)\nfunctions = add, mul, exp\nstage_order = t"));
  EXPECT_EQ(p.name, "heat");
  EXPECT_EQ(p.unknown, "u");
  EXPECT_EQ(p.variables, (std::vector<std::string>{"x", "t"}));
  EXPECT_EQ(p.spatial_variables(), (std::vector<std::string>{"x"}));
  EXPECT_EQ(p.coefficients, (std::vector<std::string>{"a"}));
  EXPECT_EQ(p.ic, parse_expr("exp(x)"));
  EXPECT_EQ(p.ref_values.at("A"), Rational(1));
  EXPECT_EQ(p.ref_values.at("B"), Rational(1, 2));
  EXPECT_EQ(p.budget, 5000);
  EXPECT_EQ(p.max_insertions, 2);
  ASSERT_TRUE(p.expected);
  EXPECT_EQ(p.functions, (std::vector<std::string>{"add", "mul", "exp"}));
  EXPECT_EQ(p.stage_order, (std::vector<std::string>{"t"}));
  EXPECT_EQ(format(p.operator_lhs), "u_t - a*u_xx");
}

TEST(Problem, RightHandSideMovesLeft) {
  PdeProblem p = parse_problem("unknown = u(x,t)\npde = u_t = a*u_xx + b*u\ncoefficients = a, b\nic = exp(x)\n");
  EXPECT_EQ(format(p.operator_lhs), "u_t - (a*u_xx + b*u)");
  EXPECT_TRUE(p.name.empty());
}

TEST(Problem, Defaults) {
  PdeProblem p = parse_problem("unknown = u(x,t)\npde = u_t - u_xx = 0\nic = x\n");
  EXPECT_EQ(p.time_var, "t");
  EXPECT_EQ(p.budget, 200000);
  EXPECT_EQ(p.max_insertions, 2);
  EXPECT_TRUE(p.coefficients.empty());
  EXPECT_TRUE(p.ref_values.empty());
}

TEST(Problem, SchemaErrors) {
  EXPECT_THROW(parse_problem("pde = u_t = 0\nic = x\n"), SchemaError);  // no unknown
  EXPECT_THROW(parse_problem("unknown = u(x,t)\nic = x\n"), SchemaError);  // no pde
  EXPECT_THROW(parse_problem(with("colour = blue")), SchemaError);  // unknown key
  EXPECT_THROW(parse_problem(with("ic = x")), SchemaError);  // duplicate
  EXPECT_THROW(parse_problem(std::string(kHeat) + "just text\n"), SchemaError); // no =
}

TEST(Problem, ValueErrors) {
  auto bad = [](const std::string& from, const std::string& to) {
    std::string s = kHeat;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  EXPECT_THROW(parse_problem(bad("budget = 5000", "budget = -3")), SchemaError);
  EXPECT_THROW(parse_problem(bad("budget = 5000", "budget = lots")), SchemaError);
  EXPECT_THROW(parse_problem(bad("max_insertions = 2", "max_insertions = 0")), SchemaError);
  EXPECT_THROW(parse_problem(bad("ref = A:1, B:1/2", "ref = A=1")), SchemaError);
  EXPECT_THROW(parse_problem(bad("ref = A:1, B:1/2", "ref = A:one")), SchemaError);
  EXPECT_THROW(parse_problem(bad("unknown = u(x,t)", "unknown = u[x]")), SchemaError);
  EXPECT_THROW(parse_problem(bad("unknown = u(x,t)", "unknown = u(xx,t)")), SchemaError);
  EXPECT_THROW(parse_problem(bad("unknown = u(x,t)", "unknown = u(x,x,t)")), SchemaError);
  EXPECT_THROW(parse_problem(with("functions = add, tanh")), SchemaError);
  EXPECT_THROW(parse_problem(with("stage_order = y")), SchemaError);
}

TEST(Problem, SemanticErrors) {
  auto bad = [](const std::string& from, const std::string& to) {
    std::string s = kHeat;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  EXPECT_THROW(parse_problem(bad("ic = exp(x)", "ic = exp(x + t)")), SemanticError);
  EXPECT_THROW(parse_problem(bad("ic = exp(x)", "ic = u_x")), SemanticError);
  EXPECT_THROW(parse_problem(bad("coefficients = a", "coefficients = b")), SemanticError);
  EXPECT_THROW(parse_problem(bad("pde = u_t - a*u_xx = 0", "pde = a*x = 0")), SemanticError);
  EXPECT_THROW(parse_problem(bad("time = t", "time = s")), SemanticError);
  EXPECT_THROW(parse_problem(bad("coefficients = a", "coefficients = a, x")), SemanticError);
}

TEST(Problem, SyntaxErrors) {
  std::string s = kHeat;
  s.replace(s.find("ic = exp(x)"), 11, "ic = exp(x");
  EXPECT_THROW(parse_problem(s), SyntaxError);
  std::string t = kHeat;
  t.replace(t.find("= 0"), 3, "= 0 = 1");
  EXPECT_THROW(parse_problem(t), SyntaxError);
}

TEST(Problem, LoadUsesFileStem) {
  auto path = std::filesystem::temp_directory_path() / "pdesym_stem_test.prob";
  {
    std::ofstream out(path);
    out << "unknown = u(x,t)\npde = u_t - u_xx = 0\nic = x\n";
  }
  EXPECT_EQ(load_problem(path).name, "pdesym_stem_test");
  std::filesystem::remove(path);
  EXPECT_THROW(load_problem(path), SchemaError);
}

TEST(Problem, CorpusLoads) {
  int n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(PDESYM_CORPUS_DIR)) {
    if (entry.path().extension() != ".prob") continue;
    PdeProblem p = load_problem(entry.path());
    EXPECT_EQ(p.name, entry.path().stem().string());
    EXPECT_TRUE(p.expected) << p.name;
    ++n;
  }
  EXPECT_EQ(n, 8);
}

TEST(Solution, RoundTrip) {
  SolutionRecord rec;
  rec.name = "helmholtz_burgers_exp_ic";
  rec.expression = parse_expr("A*exp(x/2 + t/3)");
  rec.variables = {"x", "t"};
  rec.free_params = {"A"};
  rec.resolved_params = {{"c", Expr::constant(Rational(1, 3))}};
  rec.ref_values = {{"A", Rational(1)}};
  rec.pde_pass = true;
  rec.ic_pass = true;
  rec.candidates_evaluated = 127;
  rec.stages = 1;
  std::string json = export_solution(rec);
  EXPECT_NE(json.find("\"expression_sexp\": \"(* A (exp (+ (/ x 2) (/ t 3))))\""), std::string::npos);
  EXPECT_NE(json.find("\"c\": \"1/3\""), std::string::npos);
  SolutionRecord back = import_solution(json);
  EXPECT_EQ(back, rec);
  EXPECT_EQ(export_solution(back), json);
}

TEST(Solution, ImportErrors) {
  EXPECT_THROW(import_solution("not json"), SchemaError);
  EXPECT_THROW(import_solution("{}"), SchemaError);
  SolutionRecord rec;
  rec.name = "x";
  rec.expression = parse_expr("x");
  rec.variables = {"x", "t"};
  std::string json = export_solution(rec);
  std::string broken = json;
  broken.replace(broken.find("\"expression_sexp\": \"x\""), 22, "\"expression_sexp\": \"(+ x\"");
  EXPECT_THROW(import_solution(broken), SchemaError);
}
