#pragma once

#include <iosfwd>

namespace mint::cli {

/// Exit codes: 0 success, 1 domain/runtime error, 2 usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mint::cli
