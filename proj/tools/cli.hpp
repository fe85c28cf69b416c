#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mtl/analysis.hpp"

namespace mtl::cli {

/// Runs one command line (args[0] is the program name). Returns 0 on success or all-pass,
/// 1 when a check fails and 2 on malformed input.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "builtin:<kind>:<indices>" or "combo:c1*<kind>:<indices>;c2*...".
ValuationOracle parse_oracle(const std::string& spec, int n);

}  // namespace mtl::cli
