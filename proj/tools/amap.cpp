#include <iostream>
#include <string>
#include <vector>

#include "amap/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return amap::cli::main(args, std::cout, std::cerr);
}
