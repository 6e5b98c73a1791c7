#pragma once

#include <iosfwd>

namespace lbpcert {

/// Entry point behind the lbpcert binary. Subcommands: check, run,
/// gen-grid, sweep, oracle. Exit codes: 0 success, 1 usage or parse error,
/// 2 runtime error, 3 (check only) every requested certificate inconclusive.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace lbpcert
