#include <iostream>
#include <string>
#include <vector>

#include "hrm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hrm::run_cli(args, std::cout, std::cerr);
}
