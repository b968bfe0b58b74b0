#ifndef SCIDETECT_CLI_H_
#define SCIDETECT_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace scidetect {

// Exit codes: 0 success, 1 domain error, 2 I/O or usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitIo = 2;

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace scidetect

#endif  // SCIDETECT_CLI_H_
