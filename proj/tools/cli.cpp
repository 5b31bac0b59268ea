#include "cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <sstream>

#include "pdesym/bench.hpp"
#include "pdesym/errors.hpp"
#include "pdesym/format.hpp"
#include "pdesym/parser.hpp"
#include "pdesym/problem.hpp"
#include "pdesym/search.hpp"
#include "pdesym/solution.hpp"
#include "pdesym/verify.hpp"

namespace pdesym::cli {

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kFailed = 2;

struct UsageError : Error {
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

Expr parse_user_expr(const std::string& text, const PdeProblem& problem) {
  ParseContext ctx = problem.parse_context();
  Expr e = parse_expr(text, ctx);
  if (contains_deriv(e)) throw SemanticError("a candidate cannot mention " + problem.unknown);
  return e;
}

int cmd_solve(const std::string& file, std::optional<long> budget, std::optional<int> max_insertions,
              std::uint64_t seed, int threads, bool no_timing, const std::string& out_path, std::ostream& out) {
  PdeProblem problem = load_problem(file);
  SearchConfig cfg = SearchConfig::from_problem(problem);
  if (budget) cfg.budget = *budget;
  if (max_insertions) cfg.max_insertions = *max_insertions;
  cfg.seed = seed;
  cfg.threads = threads;
  cfg.record_wall_time = !no_timing;
  SolveOutcome res = solve(problem, cfg);
  if (!res.record) {
    out << "no solution for " << problem.name << ": "
        << (res.failure ? to_string(res.failure->reason) : "search ended") << " after " << res.candidates_evaluated
        << " candidates\n";
    return kFailed;
  }
  std::string json = export_solution(*res.record);
  out << "solution: " << format(res.record->expression) << "\n";
  if (out_path.empty()) {
    out << json;
  } else {
    write_file(out_path, json);
    out << "wrote " << out_path << "\n";
  }
  return kOk;
}

int cmd_verify(const std::string& file, const std::string& candidate, const std::string& record_path,
               std::uint64_t seed, std::ostream& out) {
  PdeProblem problem = load_problem(file);
  VerifyOptions opts;
  opts.seed = seed;
  Expr e;
  if (!record_path.empty()) {
    SolutionRecord rec = import_solution(read_file(record_path));
    e = rec.expression;
    opts.lifted = rec.ref_values;
  } else {
    e = parse_user_expr(candidate, problem);
  }
  VerificationReport r = verify_candidate(problem, e, opts);
  out << "candidate: " << format(e) << "\n";
  out << "residual: " << format(tidy(r.residual_simplified)) << "\n";
  out << "pde: " << to_string(r.pde_verdict.kind);
  if (r.pde_verdict.kind == ZeroKind::WitnessNonzero) {
    out << " (value " << r.pde_verdict.value << " at";
    for (const auto& [k, v] : r.pde_verdict.point) out << " " << k << "=" << v;
    out << ")";
  }
  out << "\n";
  // the report only runs the ic check once the pde holds
  bool ic = r.ic_pass || ic_matches(problem, e, opts.lifted, &r.refs);
  out << "ic: " << (ic ? "pass" : "fail") << "\n";
  for (const auto& [k, v] : r.refs) out << "ref " << k << " = " << to_string(v) << "\n";
  out << "fitness: " << r.fitness << "\n";
  return r.fitness == 0 ? kOk : kFailed;
}

int cmd_equiv(const std::string& file, const std::string& a, const std::string& b, std::uint64_t seed,
              std::ostream& out) {
  PdeProblem problem = load_problem(file);
  Equivalence eq = check_equivalence(parse_user_expr(a, problem), parse_user_expr(b, problem), problem, seed);
  out << to_string(eq) << "\n";
  return eq == Equivalence::Equivalent ? kOk : kFailed;
}

int cmd_bench(const std::string& dir, const std::string& report, const std::string& json_path,
              std::optional<long> budget, int jobs, std::uint64_t seed, bool no_timing, std::ostream& out) {
  BenchOptions opts;
  opts.budget = budget;
  opts.jobs = jobs;
  opts.seed = seed;
  opts.record_wall_time = !no_timing;
  auto rows = run_bench(dir, opts);
  std::string csv = bench_csv(rows);
  if (report.empty()) {
    out << csv;
  } else {
    write_file(report, csv);
  }
  if (!json_path.empty()) write_file(json_path, bench_json(rows));
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.status == BenchStatus::Failed ? 1 : 0;
  out << rows.size() - failed << "/" << rows.size() << " problems solved\n";
  return any_failed(rows) ? kFailed : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Closed-form PDE solutions by staged subtree insertion with exact verification", "pdesym"};
  app.require_subcommand(1);

  std::string problem_file;
  std::optional<long> budget;
  std::optional<int> max_insertions;
  std::uint64_t seed = 1;
  int threads = 1;
  bool no_timing = false;
  std::string out_path;

  auto* solve_cmd = app.add_subcommand("solve", "search for a solution of a problem file");
  solve_cmd->add_option("problem", problem_file, "problem file")->required();
  solve_cmd->add_option("--budget", budget, "maximum candidate evaluations");
  solve_cmd->add_option("--max-insertions", max_insertions, "insertions per stage");
  solve_cmd->add_option("--seed", seed, "seed for numeric witnesses");
  solve_cmd->add_option("--threads", threads, "parallel candidate evaluation")->check(CLI::PositiveNumber);
  solve_cmd->add_flag("--no-timing", no_timing, "report wall time as 0 (byte-stable output)");
  solve_cmd->add_option("--out", out_path, "write the solution JSON here");

  std::string candidate;
  std::string record_path;
  auto* verify_cmd = app.add_subcommand("verify", "check a candidate against a problem");
  verify_cmd->add_option("problem", problem_file, "problem file")->required();
  auto* cand_opt = verify_cmd->add_option("--candidate", candidate, "candidate expression");
  auto* rec_opt = verify_cmd->add_option("--record", record_path, "solution JSON to re-verify");
  cand_opt->excludes(rec_opt);
  verify_cmd->add_option("--seed", seed, "seed for numeric witnesses");

  std::string bench_dir;
  std::string report;
  std::string json_path;
  int jobs = 1;
  auto* bench_cmd = app.add_subcommand("bench", "solve every *.prob file in a directory");
  bench_cmd->add_option("dir", bench_dir, "corpus directory")->required();
  bench_cmd->add_option("--report", report, "CSV report path (default stdout)");
  bench_cmd->add_option("--json", json_path, "JSON report path");
  bench_cmd->add_option("--budget", budget, "override every problem budget");
  bench_cmd->add_option("--jobs", jobs, "problems solved concurrently")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", seed, "seed for numeric witnesses");
  bench_cmd->add_flag("--no-timing", no_timing, "report wall times as 0");

  std::string a;
  std::string b;
  auto* equiv_cmd = app.add_subcommand("equiv", "compare two solution families");
  equiv_cmd->add_option("problem", problem_file, "problem file")->required();
  equiv_cmd->add_option("--a", a, "first expression")->required();
  equiv_cmd->add_option("--b", b, "second expression")->required();
  equiv_cmd->add_option("--seed", seed, "seed for numeric samples");

  std::vector<const char*> argv{"pdesym"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help() << "\n" << grammar_help();
    return kUsage;
  }

  try {
    if (solve_cmd->parsed())
      return cmd_solve(problem_file, budget, max_insertions, seed, threads, no_timing, out_path, out);
    if (verify_cmd->parsed()) {
      if (candidate.empty() && record_path.empty()) throw UsageError("verify needs --candidate or --record");
      return cmd_verify(problem_file, candidate, record_path, seed, out);
    }
    if (bench_cmd->parsed()) return cmd_bench(bench_dir, report, json_path, budget, jobs, seed, no_timing, out);
    if (equiv_cmd->parsed()) return cmd_equiv(problem_file, a, b, seed, out);
  } catch (const SyntaxError& e) {
    err << "error: " << e.what() << "\n\n" << grammar_help();
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace pdesym::cli
