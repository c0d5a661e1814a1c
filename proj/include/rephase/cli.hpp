#pragma once

#include <iosfwd>

namespace rephase::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericError = 3, kIoError = 4 };

/// Entry point of the `rephase` tool. Subcommands: derive, simulate,
/// two-class, fig3, ramsey-scan, fit.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rephase::cli
