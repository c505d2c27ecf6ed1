#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qmarg::cli {

enum ExitCode { ok = 0, internal = 1, invalid_input = 2, resource_cap = 3, solver_failure = 4 };

/// Runs one verb. args excludes the program name. Results go to `out`,
/// progress and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace qmarg::cli
