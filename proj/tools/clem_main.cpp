#include <iostream>
#include <string>
#include <vector>

#include "clem/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return clem::clem_main(args, std::cout, std::cerr);
}
