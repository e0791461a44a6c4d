#pragma once

#include <ostream>

namespace sarfima::cli {

/// Entry point of the `sarfima` command. Returns the process exit code:
/// 0 success, 1 usage, 2 data error, 3 numerical failure. Failures print a
/// JSON error object to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sarfima::cli
