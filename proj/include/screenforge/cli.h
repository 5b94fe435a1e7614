#ifndef SCREENFORGE_CLI_H_
#define SCREENFORGE_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <optional>

#include "screenforge/error.h"

namespace screenforge {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitEmptyActiveSet = 2;
inline constexpr int kExitInputError = 3;
inline constexpr int kExitConfigError = 4;

int exit_code_for(Errc code);

// --seed when given, else SCREENFORGE_SEED, else 0. A malformed
// environment value throws Error(kInvalidConfig).
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag);

// Entry point of the `screenforge` tool; argv[0] is the program name.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace screenforge

#endif  // SCREENFORGE_CLI_H_
