#pragma once

#include <ostream>

namespace capbp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1; // usage or validation error
inline constexpr int kExitIo = 2;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "CAPBP_OUT_DIR";

/// Entry point of the `capbp` tool with injectable streams.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace capbp::cli
