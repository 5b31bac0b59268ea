#include "pdesym/solution.hpp"

#include <nlohmann/json.hpp>

#include "pdesym/errors.hpp"
#include "pdesym/format.hpp"
#include "pdesym/parser.hpp"

namespace pdesym {

using json = nlohmann::ordered_json;

std::string export_solution(const SolutionRecord& rec) {
  json j;
  j["name"] = rec.name;
  j["expression_text"] = format(rec.expression);
  j["expression_sexp"] = format_sexp(rec.expression);
  j["variables"] = rec.variables;
  j["free_params"] = rec.free_params;
  json resolved = json::object();
  for (const auto& [k, v] : rec.resolved_params) resolved[k] = format_sexp(v);
  j["resolved_params"] = resolved;
  json refs = json::object();
  for (const auto& [k, v] : rec.ref_values) refs[k] = to_string(v);
  j["ref_values"] = refs;
  j["verification"] = {{"pde_pass", rec.pde_pass}, {"ic_pass", rec.ic_pass}};
  j["stats"] = {{"candidates_evaluated", rec.candidates_evaluated},
                {"stages", rec.stages},
                {"wall_time_ms", rec.wall_time_ms}};
  return j.dump(2) + "\n";
}

SolutionRecord import_solution(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed solution JSON: ") + e.what());
  }
  try {
    SolutionRecord rec;
    rec.name = j.at("name").get<std::string>();
    rec.variables = j.at("variables").get<std::vector<std::string>>();
    ParseContext ctx;
    ctx.variables = std::set<std::string>(rec.variables.begin(), rec.variables.end());
    j.at("expression_text").get<std::string>();
    rec.expression = parse_sexp(j.at("expression_sexp").get<std::string>(), ctx);
    rec.free_params = j.at("free_params").get<std::vector<std::string>>();
    for (const auto& [k, v] : j.at("resolved_params").items()) rec.resolved_params[k] = parse_sexp(v.get<std::string>(), ctx);
    for (const auto& [k, v] : j.at("ref_values").items()) {
      auto q = parse_rational(v.get<std::string>());
      if (!q) throw SchemaError("ref value for '" + k + "' is not a rational");
      rec.ref_values[k] = *q;
    }
    const auto& ver = j.at("verification");
    rec.pde_pass = ver.at("pde_pass").get<bool>();
    rec.ic_pass = ver.at("ic_pass").get<bool>();
    const auto& stats = j.at("stats");
    rec.candidates_evaluated = stats.at("candidates_evaluated").get<long>();
    rec.stages = stats.at("stages").get<int>();
    rec.wall_time_ms = stats.at("wall_time_ms").get<long>();
    return rec;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("solution JSON does not match the record schema: ") + e.what());
  } catch (const SyntaxError& e) {
    throw SchemaError(std::string("unreadable expression in solution JSON: ") + e.what());
  }
}

}  // namespace pdesym
