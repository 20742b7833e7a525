#include <iostream>
#include <string>
#include <vector>

#include "nanophot/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return nanophot::run_cli(args, std::cout, std::cerr);
}
