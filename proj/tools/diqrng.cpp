#include <iostream>
#include <string>
#include <vector>

#include "diqrng/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return diqrng::run_cli(args, std::cout, std::cerr);
}
