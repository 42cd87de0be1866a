#include <iostream>

#include "eciou/cli.hpp"

int main(int argc, char** argv) {
  return eciou::run_cli(argc, argv, std::cout, std::cerr);
}
