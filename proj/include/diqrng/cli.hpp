#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "diqrng/error.hpp"

namespace diqrng {

enum class ExitCode : int {
  Ok = 0,
  CheckFailed = 1,  // ran fine, but an invoked check did not pass
  Usage = 2,        // unknown command or bad flags
  Parameter = 3,
  Format = 4,
  Validation = 5,
  Convergence = 6,
  Unsupported = 7,
  Io = 8,
  Domain = 9,
  Internal = 10,
};

ExitCode exit_code_for(ErrorKind kind) noexcept;

// Subcommands: simulate, counts, certify, rate, spacetime, extract, report,
// rate-curve. args excludes the program name. Errors are reported on err as
// one JSON line {"error": {"kind", "exit_code", "message"}}.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace diqrng
