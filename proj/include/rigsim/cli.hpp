#pragma once

namespace rigsim::cli {

/// Exit status: 0 success, 1 runtime failure, 2 invalid config or arguments.
int run(int argc, char** argv);

}  // namespace rigsim::cli
