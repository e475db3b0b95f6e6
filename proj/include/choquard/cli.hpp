#pragma once

namespace choquard::cli {

/// Entry point of the command-line tool.  Exit code 0 when every assertion of
/// the invoked command passes, 1 on an assertion or numerical failure, 2 on a
/// usage error.
int run(int argc, char** argv);

}  // namespace choquard::cli
