#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pdesym::cli {

// Exit codes: 0 success, 1 usage error, 2 failure (no solution, fitness 1, ...).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pdesym::cli
