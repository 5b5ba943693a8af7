#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace povm::cli {

/// Exit codes: 0 success, 1 a check failed, 2 malformed input (a one-line
/// {"error": ..., "kind": ...} object goes to `err`).
int run(int argc, char **argv);
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace povm::cli
