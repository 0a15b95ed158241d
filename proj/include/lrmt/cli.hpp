#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lrmt {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitPipeline = 3;

/// Runs one command line (without the program name). Never throws; the
/// return value is the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lrmt
