#include <iostream>

#include "pcgwb/cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return pcgwb::cli::run_cli(argc, argv, std::cout, std::cerr, std::cin);
}
