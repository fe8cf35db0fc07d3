#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace treehash::cli {

// Process exit statuses. Stable; listed in docs/cli.md.
enum Status : int {
  kOk = 0,
  kUsage = 1,
  kIo = 2,
  kConfig = 3,
  kDecode = 4,
};

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);
// Convenience for tests: args excludes the program name.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace treehash::cli
