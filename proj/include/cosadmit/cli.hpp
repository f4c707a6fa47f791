#pragma once

#include <iosfwd>

namespace cosadmit {

/// Command-line entry point. Exit codes: 0 success, 1 invalid input
/// (bad flags, config, domain or divergence), 2 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cosadmit
