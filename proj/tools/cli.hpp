#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ucscreen::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;     // bad input or a failed computation
inline constexpr int kUsage = 2;       // bad flags or arguments
inline constexpr int kInfeasible = 3;  // `solve --no-slack` found no feasible point

// Runs one command line (without the program name). Results go to `out` or
// to the files named by the flags; failures print a one-line JSON record
// {"error": {"command", "kind", "message"}} to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ucscreen::cli
