#pragma once

#include <string>
#include <vector>

namespace newsseg::cli {

/// Entry point behind the newsseg binary. Exit codes: 0 success,
/// 1 validation error (bad schema, overlaps, bad flags), 2 I/O error.
/// With --json-errors failures also emit a machine-readable JSON object
/// on stderr.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

/// Help text for a subcommand ("" for the top level); used by the
/// doc-coverage test.
std::string help_text(const std::string& subcommand);

}  // namespace newsseg::cli
