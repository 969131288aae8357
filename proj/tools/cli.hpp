#pragma once

#include <iosfwd>

namespace tschief::cli {

  /// Runs one command; returns the process exit status (0 on success, 2 on any error).
  int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace tschief::cli
