#include <iostream>
#include <string>
#include <vector>

#include "tdtrnn/commands.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tdtrnn::run_cli(args, std::cout, std::cerr);
}
