#pragma once

#include <iosfwd>

namespace fixedsnr {

// Entry point of the command-line tool. Returns the process exit code:
// 0 success, 2 configuration error, 3 colouring failure, 4 runtime invariant.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fixedsnr
