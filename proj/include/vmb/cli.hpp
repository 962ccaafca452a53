#pragma once
// Command-line front end: vmbl <subcommand> [options].
//   coeffs | check-operator | simulate-kinetic | simulate-mhd | converge
// Exit codes: 0 ok, 1 validation, 2 numerical, 3 io.
#include <iosfwd>

namespace vmb {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vmb
