#include <iostream>

#include "fcba/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return fcba::run_cli(args, std::cout, std::cerr);
}
