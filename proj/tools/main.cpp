#include <iostream>
#include <string>
#include <vector>

#include "wnh/cli.hpp"

int main(int argc, char** argv) {
  return wnh::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
