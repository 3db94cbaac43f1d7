#pragma once

#include <iosfwd>

namespace oriole::cli {

/// Exit codes: 0 success, 1 input error, 2 numeric error.
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace oriole::cli
