#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kwstega::cli {

/// Runs one invocation. `args` excludes the program name. Data goes to `out`
/// (or the --out file), diagnostics to `err`. Returns 0 on success, 1 on an
/// operation failure and 2 on a usage error.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace kwstega::cli
