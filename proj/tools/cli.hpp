#pragma once

#include <ostream>

namespace qchain::cli {

/// Exit codes: 0 success, 1 a gated check failed, 2 usage or input error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs the qchain command line. Results go to `out`; errors are written to `err` as
/// a single JSON object.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qchain::cli
