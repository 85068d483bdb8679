#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace simpaste::cli {

enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,  // validation or runtime error
  kPartial = 2,  // some scenes were skipped
};

/// Entry point shared by the `simpaste` binary and the tests. `args` excludes
/// the program name. Subcommands: ingest, synth, extract, compose, eval.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace simpaste::cli
