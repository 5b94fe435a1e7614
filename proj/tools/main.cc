#include <iostream>

#include "screenforge/cli.h"

int main(int argc, char** argv) {
  return screenforge::run_cli(argc, argv, std::cout, std::cerr);
}
