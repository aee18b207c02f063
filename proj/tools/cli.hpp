#pragma once

#include <iosfwd>

namespace convtact {

// Runs one subcommand. Exit codes: 0 ok, 1 usage error, 2 data or format error.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int cli_dispatch(int argc, const char* const* argv);

}  // namespace convtact
