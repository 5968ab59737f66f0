#pragma once

#include <iosfwd>

namespace flapkin {

/// Runs one subcommand. Returns 0 on success, 1 on a domain error (one
/// "error code=..." line on `err`), 2 on bad usage.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int cli_main(int argc, const char* const* argv);

}  // namespace flapkin
