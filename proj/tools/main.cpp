#include <iostream>

#include "lbpcert/cli.hpp"

int main(int argc, char** argv) {
  return lbpcert::run_cli(argc, argv, std::cout, std::cerr);
}
