#include <iostream>
#include <string>
#include <vector>

#include "lexwalk/cli.hpp"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv, argv + argc);
  return lexwalk::cli::run(args, std::cout, std::cerr);
}
