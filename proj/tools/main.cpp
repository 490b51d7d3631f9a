#include <iostream>
#include <string>
#include <vector>

#include "ancvi/bench.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ancvi::bench::run_cli(args, std::cout, std::cerr);
}
