#include <iostream>
#include <string>
#include <vector>

#include "gapforms/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gapforms::cli::run(args, std::cout, std::cerr);
}
