#include <iostream>
#include <string>
#include <vector>

#include "adtdesign/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return adt::run_command(args, std::cout, std::cerr);
}
