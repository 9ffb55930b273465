#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace blpk::cli {

// Exit codes:
//   0 success
//   1 usage error (also: refusing to overwrite without --force)
//   2 format error (bad magic, unsupported version, corrupt data, ...)
//   3 checksum mismatch
//   4 I/O error
//   5 append space exhausted
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFormat = 2;
inline constexpr int kExitChecksum = 3;
inline constexpr int kExitIo = 4;
inline constexpr int kExitNoSpace = 5;

/// Runs one blpk invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace blpk::cli
