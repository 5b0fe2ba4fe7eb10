#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace shearvol::cli {

enum ExitCode : int {
  kOk = 0,
  kRuntimeFailure = 1,
  kUsage = 2,      // unknown or malformed flags
  kIo = 3,         // unreadable, unwritable or malformed files
  kInvalid = 4,    // shape, config, bounds and other data errors
};

/// Runs one `shearvol` invocation. `args` excludes the program name.
/// Normal output goes to `out`, diagnostics and usage to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shearvol::cli
