#pragma once

#include <ostream>

namespace spacelike::cli {

// Exit codes: 0 success, 1 `check` found an inconsistent policy, 2 bad
// arguments or config, 3 infeasible geometry.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spacelike::cli
