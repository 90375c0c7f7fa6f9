#pragma once

#include "gctl/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace gctl {

/// Subcommands understood by run().
std::vector<std::string> subcommands();

/// Runs one experiment and writes its CSV files into cfg.output_dir. Prints a
/// one-line summary per check to `log`. Returns 0 iff every check passed, 1
/// if some check failed and 2 on a usage or configuration error.
int run(const std::string& subcommand, const ExperimentConfig& cfg, std::ostream& log);

}  // namespace gctl
