#include <iostream>
#include <string>
#include <vector>

#include "ricav/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ricav::run_cli(args, std::cout, std::cerr);
}
