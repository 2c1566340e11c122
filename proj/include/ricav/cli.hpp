#ifndef RICAV_CLI_HPP
#define RICAV_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace ricav {

// Runs the command line driver on already-split arguments (no program name).
// JSON (or CSV for plot-data) goes to out, human-readable summaries and
// machine-readable errors go to err.  Returns the process exit code:
// 0 clean, 2 a checked property failed, 1 anything else went wrong.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ricav

#endif
