#include <iostream>
#include <string>
#include <vector>

#include "boostkit/cli.hpp"

int main(int argc, char** argv) {
  return boostkit::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
