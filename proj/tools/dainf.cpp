#include <iostream>

#include "dainf/workbench.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dainf::run_command(args, std::cout, std::cerr);
}
