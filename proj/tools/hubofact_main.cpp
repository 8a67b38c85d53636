#include <iostream>
#include <string>
#include <vector>

#include "hubofact/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hubofact::cli::cli_run(std::move(args), std::cout, std::cerr);
}
