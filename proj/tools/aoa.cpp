#include <iostream>

#include "aoa/cli.hpp"

int main(int argc, char** argv) {
  return aoa::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
