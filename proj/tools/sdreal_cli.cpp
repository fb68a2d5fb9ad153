#include <iostream>
#include <string>
#include <vector>

#include "sdreal/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return sdreal::cli::run(args, std::cout, std::cerr);
}
