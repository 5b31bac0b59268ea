#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pdesym {

enum class BenchStatus : std::uint8_t { Recovered, Equivalent, Failed };

const char* to_string(BenchStatus s);

struct BenchReportRow {
  std::string name;
  BenchStatus status = BenchStatus::Failed;
  std::string solution;
  long candidates = 0;
  long wall_time_ms = 0;
  std::string note;  // failure detail, not part of the CSV
};

struct BenchOptions {
  int jobs = 1;  // problems solved concurrently
  std::optional<long> budget;
  std::optional<int> max_insertions;
  std::uint64_t seed = 1;
  bool record_wall_time = true;
};

// Solves every *.prob file directly inside `dir`. A row is recovered when the
// solution minus `expected` simplifies to 0 (or no `expected` is given),
// equivalent when check_equivalence succeeds, failed otherwise. Rows are ordered by
// problem name.
std::vector<BenchReportRow> run_bench(const std::filesystem::path& dir, const BenchOptions& opts = {});

// name,status,solution,candidates,wall_time_ms
std::string bench_csv(const std::vector<BenchReportRow>& rows);
std::string bench_json(const std::vector<BenchReportRow>& rows);

bool any_failed(const std::vector<BenchReportRow>& rows);

}  // namespace pdesym
