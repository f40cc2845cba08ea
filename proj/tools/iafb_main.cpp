#include <iostream>

#include "iafb/cli.hpp"

int main(int argc, char** argv) {
  return iafb::cli::run(argc, argv, std::cout, std::cerr);
}
