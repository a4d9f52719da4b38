#include <iostream>
#include <string>
#include <vector>

#include "infogeo/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return infogeo::run_cli(args, std::cout, std::cerr);
}
