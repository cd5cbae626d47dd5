#include <iostream>

#include "mme/cli.hpp"

int main(int argc, char** argv) {
  return mme::cli::run(argc, argv, std::cout, std::cerr);
}
