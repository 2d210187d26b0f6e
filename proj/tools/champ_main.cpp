#include <iostream>

#include "champ/cli.hpp"

int main(int argc, char** argv) {
  return champ::run_cli(argc, argv, std::cout, std::cerr);
}
