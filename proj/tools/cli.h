#ifndef FGPROP_TOOLS_CLI_H_
#define FGPROP_TOOLS_CLI_H_

#include <iosfwd>

namespace fgprop::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the fgprop tool. Normal output goes to `out`, diagnostics
// to `err`.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace fgprop::cli

#endif  // FGPROP_TOOLS_CLI_H_
