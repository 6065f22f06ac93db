#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tmw::cli {

enum ExitCode : int { kOk = 0, kFindings = 1, kUsage = 2 };

struct Options {
  bool color = false;  // ANSI colour in human summaries
};

// args excludes the program name. Human summaries go to `out`, errors and
// diagnostics to `err`; machine-readable output goes to the paths named by
// the flags ("-" = `out`).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const Options& options = {});

// TTY check plus TM_COLOR (0 disables).
bool color_wanted();

}  // namespace tmw::cli
