#include <iostream>
#include <string>
#include <vector>

#include "infoshare/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return infoshare::run_cli(args, std::cout, std::cerr);
}
