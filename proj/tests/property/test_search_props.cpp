#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "pdesym/bench.hpp"
#include "pdesym/errors.hpp"
#include "pdesym/parser.hpp"
#include "pdesym/search.hpp"
#include "pdesym/solution.hpp"
#include "pdesym/verify.hpp"

using namespace pdesym;
using pdesym::proptest::ExprGen;

namespace {

PdeProblem corpus(const std::string& name) { return load_problem(std::string(PDESYM_CORPUS_DIR) + "/" + name + ".prob"); }

// Number of selections of 1..m insertions at distinct positions, each position
// offering `per` choices: the elementary symmetric sums of (per, per, ..., per).
double selections(std::size_t positions, std::size_t per, int m) {
  double total = 0;
  double choose = 1;
  for (int k = 1; k <= m && static_cast<std::size_t>(k) <= positions; ++k) {
    choose = choose * static_cast<double>(positions - static_cast<std::size_t>(k) + 1) / k;
    total += choose * std::pow(static_cast<double>(per), k);
  }
  return total;
}

std::vector<Function> random_functions(ExprGen& gen) {
  std::vector<Function> all{Function::Add, Function::Sub, Function::Mul, Function::Div,
                            Function::Pow, Function::Exp, Function::Sin};
  std::vector<Function> out;
  for (auto f : all)
    if (gen.coin()) out.push_back(f);
  if (out.empty()) out.push_back(Function::Mul);
  return out;
}

}  // namespace

TEST(SearchProperty, PoolSizeLaw) {
  ExprGen gen(41);
  gen.vars = {"x"};
  SearchConfig cfg;
  for (int i = 0; i < 500; ++i) {
    Expr ic = gen();
    auto fs = random_functions(gen);
    std::vector<std::string> coeffs;
    if (gen.coin()) coeffs.push_back("a");
    if (gen.coin()) coeffs.push_back("b");
    auto ts = build_stage_terminals("t", coeffs, cfg);
    auto ps = positions(ic);
    std::size_t bin = 0;
    for (auto f : fs) bin += is_unary(f) ? 0 : 1;
    auto pool = assemble_pool(ps, ts, fs);
    ASSERT_EQ(pool.size(), ps.size() * (2 * bin * ts.size() + (fs.size() - bin)));
  }
}

// Stages that never accept enumerate exactly the selection count, which never
// exceeds (2|F||T| + 1)^|P|.
TEST(SearchProperty, EnumerationCountAndBound) {
  ExprGen gen(42);
  gen.vars = {"x"};
  gen.max_depth = 1;
  gen.transcendental = false;
  // Almost nothing built from these pieces solves u_t = u^3 + x*u_xx.
  PdeProblem p = parse_problem("unknown = u(x,t)\npde = u_t - u^3 - x*u_xx = 0\nic = x\n");
  int runs = 0;
  for (int i = 0; i < 60; ++i) {
    p.ic = Expr::constant(7) + gen();
    SearchConfig cfg = SearchConfig::from_problem(p);
    cfg.functions = random_functions(gen);
    cfg.max_insertions = i % 4 == 0 && p.ic.node_count() <= 3 ? 2 : 1;
    if (cfg.max_insertions == 2 && cfg.functions.size() > 2) cfg.functions.resize(2);
    cfg.terminal_patterns = {"v", "c*v", "v^2"};
    StageState st;
    st.current = p.ic;
    st.variable = "t";
    st.positions = positions(st.current);
    st.terminals = build_stage_terminals("t", {}, cfg);
    SearchCounters counters;
    StageResult r = enumerate_stage(st, p, cfg, counters);
    std::size_t bin = 0;
    for (auto f : cfg.functions) bin += is_unary(f) ? 0 : 1;
    std::size_t per = 2 * bin * st.terminals.size() + (cfg.functions.size() - bin);
    double expected = selections(st.positions.size(), per, cfg.max_insertions);
    double bound = std::pow(2.0 * static_cast<double>(cfg.functions.size() * st.terminals.size()) + 1,
                            static_cast<double>(st.positions.size()));
    ASSERT_LE(static_cast<double>(r.evaluated), bound);
    ASSERT_NEAR(r.bound, std::log10(bound), 1e-9);
    if (!r.accepted) {
      ASSERT_EQ(static_cast<double>(counters.evaluated + counters.skipped), expected) << format(p.ic);
      ++runs;
    }
  }
  EXPECT_GT(runs, 40);
}

TEST(SearchProperty, DeterministicJson) {
  for (const char* name : {"heat_exp", "heat_poly", "helmholtz_burgers_exp_ic", "burgers_linear", "wave_quadratic"}) {
    PdeProblem p = corpus(name);
    SearchConfig cfg = SearchConfig::from_problem(p);
    cfg.record_wall_time = false;
    std::string first = export_solution(*solve(p, cfg).record);
    std::string second = export_solution(*solve(p, cfg).record);
    ASSERT_EQ(first, second) << name;
    cfg.threads = 3;
    ASSERT_EQ(export_solution(*solve(p, cfg).record), first) << name;
  }
  auto a = run_bench(PDESYM_CORPUS_DIR, BenchOptions{1, {}, {}, 1, false});
  auto b = run_bench(PDESYM_CORPUS_DIR, BenchOptions{4, {}, {}, 1, false});
  EXPECT_EQ(bench_json(a), bench_json(b));
  EXPECT_EQ(bench_csv(a), bench_csv(b));
}

TEST(SearchProperty, RecordRoundTrip) {
  ExprGen gen(43);
  gen.params = {"A", "B", "a", "c"};
  for (int i = 0; i < 500; ++i) {
    SolutionRecord rec;
    rec.name = "case" + std::to_string(i);
    rec.expression = gen();
    rec.variables = {"x", "t"};
    for (const auto& p : params_of(rec.expression)) rec.free_params.push_back(p);
    if (gen.coin()) rec.resolved_params["c"] = gen();
    if (gen.coin()) rec.ref_values["A"] = gen.small_rational();
    rec.pde_pass = gen.coin();
    rec.ic_pass = gen.coin();
    rec.candidates_evaluated = gen.pick(100000);
    rec.stages = gen.pick(3);
    rec.wall_time_ms = gen.pick(1000);
    std::string json = export_solution(rec);
    SolutionRecord back = import_solution(json);
    ASSERT_EQ(back, rec) << json;
    ASSERT_EQ(export_solution(back), json);
  }
}

TEST(SearchProperty, EquivalenceSymmetric) {
  PdeProblem p = corpus("heat_poly");
  ExprGen gen(44);
  gen.params = {"A", "B", "a"};
  gen.max_depth = 3;
  for (int i = 0; i < 150; ++i) {
    Expr a = gen();
    Expr b = gen.coin() ? gen() : substitute(a, {{"A", Expr::param("C") * Expr::constant(2) + Expr::constant(1)}});
    ASSERT_EQ(check_equivalence(a, b, p), check_equivalence(b, a, p)) << format(a) << " ; " << format(b);
  }
}

// Candidates whose residual cannot be decided (undefined at every sample point, or
// not canonicalizable) must never reach fitness 0.
TEST(SearchProperty, UndecidedNeverPasses) {
  PdeProblem heat = corpus("heat_exp");
  ExprGen gen(45);
  gen.max_depth = 2;
  for (int i = 0; i < 200; ++i) {
    Expr g = gen();
    for (Expr c : {log(-(g * g) - Expr::constant(1)) + exp(Expr::var("x") + Expr::param("a") * Expr::var("t")),
                   g / Expr::constant(0), sqrt(-exp(g))}) {
      VerificationReport r = verify_candidate(heat, c);
      if (r.fitness == 0) {
        ASSERT_TRUE(r.pde_verdict.certified()) << format(c);
        ASSERT_TRUE(r.ic_pass) << format(c);
      }
      if (r.pde_verdict.kind == ZeroKind::Undecided) ASSERT_EQ(r.fitness, 1) << format(c);
    }
  }
}
