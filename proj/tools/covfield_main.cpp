#include <iostream>
#include <vector>

#include "covfield/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return covfield::cli::run_cli(args, std::cout, std::cerr);
}
