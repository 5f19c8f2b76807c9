#pragma once

// chbs run|eps-study|cont-dep|check [--config PATH]... [--out DIR] [--quiet]
//
// Exit codes: 0 all checks pass, 1 an experiment failed, 2 configuration or
// compatibility error.

#include <iosfwd>

namespace chbs {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace chbs
