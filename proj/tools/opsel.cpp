#include <iostream>

#include "opsel/cli.hpp"

int main(int argc, char** argv) {
  return opsel::cli_main(argc, argv, std::cout, std::cerr);
}
