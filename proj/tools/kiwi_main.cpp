#include <vector>

#include "kiwi/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return kiwi::cli::run_command(args);
}
