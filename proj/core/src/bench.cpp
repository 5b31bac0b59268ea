#include "pdesym/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <nlohmann/json.hpp>
#include <thread>

#include "pdesym/errors.hpp"
#include "pdesym/format.hpp"
#include "pdesym/problem.hpp"
#include "pdesym/search.hpp"
#include "pdesym/simplify.hpp"
#include "pdesym/verify.hpp"

namespace pdesym {

const char* to_string(BenchStatus s) {
  switch (s) {
    case BenchStatus::Recovered: return "recovered";
    case BenchStatus::Equivalent: return "equivalent";
    case BenchStatus::Failed: return "failed";
  }
  return "?";
}

namespace {


// Both forms pinned to the ic (reference values first) give the same function.
bool same_particular(const PdeProblem& problem, const Expr& a, const Expr& b, std::uint64_t seed) {
  std::map<std::string, Rational> ra;
  std::map<std::string, Rational> rb;
  if (!ic_matches(problem, a, problem.ref_values, &ra) || !ic_matches(problem, b, problem.ref_values, &rb))
    return false;
  auto bind = [](const std::map<std::string, Rational>& refs) {
    std::map<std::string, Expr> out;
    for (const auto& [k, v] : refs) out[k] = Expr::constant(v);
    return out;
  };
  return zero_certificate(substitute(a, bind(ra)) - substitute(b, bind(rb)), seed).certified();
}

BenchReportRow run_one(const std::filesystem::path& file, const BenchOptions& opts) {
  BenchReportRow row;
  row.name = file.stem().string();
  auto start = std::chrono::steady_clock::now();
  try {
    PdeProblem problem = load_problem(file);
    row.name = problem.name;
    SearchConfig cfg = SearchConfig::from_problem(problem);
    if (opts.budget) cfg.budget = *opts.budget;
    if (opts.max_insertions) cfg.max_insertions = *opts.max_insertions;
    cfg.seed = opts.seed;
    cfg.record_wall_time = opts.record_wall_time;
    SolveOutcome out = solve(problem, cfg);
    row.candidates = out.candidates_evaluated;
    if (!out.record) {
      row.note = out.failure ? to_string(out.failure->reason) : "no solution";
    } else {
      const Expr& sol = out.record->expression;
      row.solution = format(sol);
      if (!problem.expected) {
        row.status = BenchStatus::Recovered;
      } else if (zero_certificate(sol - *problem.expected, opts.seed).certified() ||
                 same_particular(problem, sol, *problem.expected, opts.seed)) {
        row.status = BenchStatus::Recovered;
      } else {
        Equivalence eq = check_equivalence(sol, *problem.expected, problem, opts.seed);
        if (eq == Equivalence::Equivalent) {
          row.status = BenchStatus::Equivalent;
        } else {
          row.note = std::string("expected form: ") + to_string(eq);
        }
      }
    }
  } catch (const Error& e) {
    row.note = e.what();
  }
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  row.wall_time_ms = opts.record_wall_time ? static_cast<long>(ms) : 0;
  return row;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<BenchReportRow> run_bench(const std::filesystem::path& dir, const BenchOptions& opts) {
  if (!std::filesystem::is_directory(dir)) throw SchemaError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".prob") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<BenchReportRow> rows(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) rows[i] = run_one(files[i], opts);
  };
  int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(files.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return rows;
}

std::string bench_csv(const std::vector<BenchReportRow>& rows) {
  std::string out = "name,status,solution,candidates,wall_time_ms\n";
  for (const auto& r : rows) {
    out += csv_field(r.name) + "," + to_string(r.status) + "," + csv_field(r.solution) + "," +
           std::to_string(r.candidates) + "," + std::to_string(r.wall_time_ms) + "\n";
  }
  return out;
}

std::string bench_json(const std::vector<BenchReportRow>& rows) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  std::size_t failed = 0;
  for (const auto& r : rows) {
    nlohmann::ordered_json row{{"name", r.name},
                               {"status", to_string(r.status)},
                               {"solution", r.solution},
                               {"candidates", r.candidates},
                               {"wall_time_ms", r.wall_time_ms}};
    if (!r.note.empty()) row["note"] = r.note;
    if (r.status == BenchStatus::Failed) ++failed;
    j.push_back(std::move(row));
  }
  nlohmann::ordered_json doc{{"problems", rows.size()}, {"failed", failed}, {"rows", j}};
  return doc.dump(2) + "\n";
}

bool any_failed(const std::vector<BenchReportRow>& rows) {
  return std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.status == BenchStatus::Failed; });
}

}  // namespace pdesym
