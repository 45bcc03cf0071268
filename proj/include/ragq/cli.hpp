#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ragq {

// Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitRuntime = 3;

// `args` excludes the program name. Results go to `out`, diagnostics and
// usage text to `err`.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace ragq
