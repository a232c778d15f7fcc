#pragma once

#include <iosfwd>

namespace rtvae::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Runs the `rtvae` command line. Returns 0 on success, 1 on data or config
/// errors and 2 on usage errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace rtvae::cli
