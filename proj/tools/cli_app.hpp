#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cmseq::cli {

// Process exit codes.
inline constexpr int kSuccess = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kInputError = 2;
inline constexpr int kNumericError = 3;
inline constexpr int kInconsistent = 4;

int run(int argc, char** argv);

/// Runs the tool with argv[0] omitted, writing summaries and diagnostics to
/// the given streams.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cmseq::cli
