#include <benchmark/benchmark.h>

#include "pdesym/calculus.hpp"
#include "pdesym/canonical.hpp"
#include "pdesym/format.hpp"
#include "pdesym/parser.hpp"
#include "pdesym/search.hpp"
#include "pdesym/simplify.hpp"

using namespace pdesym;

namespace {

PdeProblem corpus(const std::string& name) { return load_problem(std::string(PDESYM_CORPUS_DIR) + "/" + name + ".prob"); }

void BM_ParseFormat(benchmark::State& state) {
  const std::string text = "A*exp(x/2 + t/3) + (B + x)/(A + t) - sin(a*x)^2*sqrt(t + 1)";
  for (auto _ : state) benchmark::DoNotOptimize(format(parse_expr(text)));
}
BENCHMARK(BM_ParseFormat);

void BM_CanonicalizePower(benchmark::State& state) {
  Expr e = pow(parse_expr("x + a*t + exp(x) + 1"), Expr::constant(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cas::canonicalize(e));
}
BENCHMARK(BM_CanonicalizePower)->Arg(2)->Arg(4)->Arg(8);

void BM_RationalCancel(benchmark::State& state) {
  Expr e = parse_expr("((x + a)^3*(t - b)^2)/((x + a)*(t - b)^3) - (x + a)^2/(t - b)");
  for (auto _ : state) benchmark::DoNotOptimize(zero_certificate(e));
}
BENCHMARK(BM_RationalCancel);

void BM_HelmholtzResidual(benchmark::State& state) {
  PdeProblem p = corpus("helmholtz_burgers_exp_ic");
  Expr cand = parse_expr("A*exp(x/2 + c*t)");
  for (auto _ : state) benchmark::DoNotOptimize(residual_form(p.operator_lhs, cand, p.unknown));
}
BENCHMARK(BM_HelmholtzResidual);

void BM_Solve(benchmark::State& state, const char* name, int threads) {
  PdeProblem p = corpus(name);
  SearchConfig cfg = SearchConfig::from_problem(p);
  cfg.threads = threads;
  long evaluated = 0;
  for (auto _ : state) {
    SolveOutcome o = solve(p, cfg);
    evaluated = o.candidates_evaluated;
    benchmark::DoNotOptimize(o);
  }
  state.counters["candidates"] = static_cast<double>(evaluated);
  state.counters["candidates/s"] =
      benchmark::Counter(static_cast<double>(evaluated), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK_CAPTURE(BM_Solve, heat_exp, "heat_exp", 1)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Solve, heat_exp_4threads, "heat_exp", 4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Solve, helmholtz_exp, "helmholtz_burgers_exp_ic", 1)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Solve, reaction_diffusion, "reaction_diffusion", 1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
