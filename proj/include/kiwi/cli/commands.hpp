#pragma once

#include <string>
#include <vector>

namespace kiwi::cli {

// Entry point behind the `kiwi` binary. args excludes the program name,
// e.g. {"train", "--config", "config.yml"}. Returns the process exit
// status: 0 on success, nonzero with a one-line diagnostic on stderr.
// This is also the programmatic equivalent of each subcommand.
int run_command(const std::vector<std::string>& args);

}  // namespace kiwi::cli
