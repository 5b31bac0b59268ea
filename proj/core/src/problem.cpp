#include "pdesym/problem.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "pdesym/errors.hpp"
#include "pdesym/format.hpp"

namespace pdesym {

std::vector<std::string> PdeProblem::spatial_variables() const {
  std::vector<std::string> out;
  for (const auto& v : variables)
    if (v != time_var) out.push_back(v);
  return out;
}

ParseContext PdeProblem::parse_context() const {
  ParseContext ctx;
  ctx.variables = std::set<std::string>(variables.begin(), variables.end());
  ctx.unknown = unknown;
  return ctx;
}

namespace {

const std::set<std::string> kKeys{"name",   "unknown", "pde",    "coefficients", "time",     "ic",
                                  "ref",    "budget",  "max_insertions",         "expected", "functions",
                                  "stage_order"};

const std::set<std::string> kFunctionNames{"add", "sub", "mul", "div", "pow", "exp", "log", "sin", "cos", "sqrt"};

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool is_identifier(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); });
}

Expr parse_field(const std::string& key, const std::string& text, const ParseContext& ctx) {
  try {
    return parse_expr(text, ctx);
  } catch (const SyntaxError& err) {
    throw SyntaxError(err.offset(), err.expected(), "in '" + key + "': " + err.what());
  }
}

long parse_positive(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    long v = std::stol(text, &used);
    if (used == text.size() && v > 0) return v;
  } catch (const std::exception&) {
  }
  throw SchemaError("'" + key + "' must be a positive integer, got '" + text + "'");
}

}  // namespace

PdeProblem parse_problem(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw SchemaError("line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!kKeys.count(key)) throw SchemaError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (kv.count(key)) throw SchemaError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv[key] = value;
  }
  for (const char* required : {"unknown", "pde", "ic"})
    if (!kv.count(required)) throw SchemaError(std::string("missing required key '") + required + "'");

  PdeProblem p;
  if (kv.count("name")) p.name = kv["name"];

  static const std::regex unknown_re(R"(^([A-Za-z]+)\s*\(([^)]*)\)$)");
  std::smatch m;
  if (!std::regex_match(kv["unknown"], m, unknown_re))
    throw SchemaError("'unknown' must look like u(x,t), got '" + kv["unknown"] + "'");
  p.unknown = m[1];
  p.variables = split_list(m[2]);
  if (p.variables.empty()) throw SchemaError("'unknown' lists no variables");
  for (const auto& v : p.variables)
    if (v.size() != 1 || !std::isalpha(static_cast<unsigned char>(v[0])))
      throw SchemaError("variables must be single letters, got '" + v + "'");
  if (std::set<std::string>(p.variables.begin(), p.variables.end()).size() != p.variables.size())
    throw SchemaError("'unknown' repeats a variable");

  if (kv.count("time")) p.time_var = kv["time"];
  if (std::find(p.variables.begin(), p.variables.end(), p.time_var) == p.variables.end())
    throw SemanticError("time variable '" + p.time_var + "' is not an argument of " + p.unknown);

  ParseContext ctx = p.parse_context();

  if (kv.count("coefficients")) p.coefficients = split_list(kv["coefficients"]);
  for (const auto& c : p.coefficients) {
    if (!is_identifier(c) || ctx.variables.count(c) || c == p.unknown)
      throw SemanticError("'" + c + "' cannot be a coefficient name");
  }

  // pde = lhs = rhs, stored as lhs - rhs.
  const std::string& pde = kv["pde"];
  auto eq = pde.find('=');
  if (eq != std::string::npos && pde.find('=', eq + 1) != std::string::npos)
    throw SyntaxError(pde.find('=', eq + 1), {"end of input"}, "in 'pde': more than one '='");
  Expr lhs = parse_field("pde", eq == std::string::npos ? pde : pde.substr(0, eq), ctx);
  if (eq != std::string::npos) {
    Expr rhs = parse_field("pde", pde.substr(eq + 1), ctx);
    if (!rhs.is_zero()) lhs = lhs - rhs;
  }
  p.operator_lhs = lhs;
  if (!contains_deriv(p.operator_lhs)) throw SemanticError("the pde does not mention " + p.unknown);
  for (const auto& name : params_of(p.operator_lhs)) {
    if (std::find(p.coefficients.begin(), p.coefficients.end(), name) == p.coefficients.end())
      throw SemanticError("pde parameter '" + name + "' is not listed in coefficients");
  }

  p.ic = parse_field("ic", kv["ic"], ctx);
  if (contains_deriv(p.ic)) throw SemanticError("ic must not mention " + p.unknown);
  if (contains_symbol(p.ic, p.time_var)) throw SemanticError("ic must not depend on " + p.time_var);

  if (kv.count("ref")) {
    for (const auto& item : split_list(kv["ref"])) {
      auto colon = item.find(':');
      if (colon == std::string::npos) throw SchemaError("ref entries look like A:1, got '" + item + "'");
      std::string key = trim(std::string_view(item).substr(0, colon));
      auto value = parse_rational(trim(std::string_view(item).substr(colon + 1)));
      if (!is_identifier(key) || !value) throw SchemaError("bad ref entry '" + item + "'");
      p.ref_values[key] = *value;
    }
  }
  if (kv.count("budget")) p.budget = parse_positive("budget", kv["budget"]);
  if (kv.count("max_insertions")) p.max_insertions = static_cast<int>(parse_positive("max_insertions", kv["max_insertions"]));

  if (kv.count("expected")) {
    Expr e = parse_field("expected", kv["expected"], ctx);
    if (contains_deriv(e)) throw SemanticError("expected must not mention " + p.unknown);
    p.expected = e;
  }
  if (kv.count("functions")) {
    p.functions = split_list(kv["functions"]);
    for (const auto& f : p.functions)
      if (!kFunctionNames.count(f)) throw SchemaError("unknown function '" + f + "' in functions");
  }
  if (kv.count("stage_order")) {
    p.stage_order = split_list(kv["stage_order"]);
    for (const auto& v : p.stage_order)
      if (!ctx.variables.count(v)) throw SchemaError("stage_order names '" + v + "', not a variable");
  }
  return p;
}

PdeProblem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read problem file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  PdeProblem p = parse_problem(text);
  if (p.name.empty()) p.name = path.stem().string();
  return p;
}

}  // namespace pdesym
