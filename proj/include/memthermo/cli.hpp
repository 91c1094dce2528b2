#pragma once

#include <ostream>

namespace memthermo {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitProtocol = 2;
inline constexpr int kExitIo = 3;

// memthermo <subcommand> [--config PATH] [--out DIR] [--seed N] [--preset LEVEL]
// Failures print one line to `err`:
//   memthermo: error code=<n> kind=<kind> message=<text>
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace memthermo
