#include <iostream>
#include <string>
#include <vector>

#include "twodescent/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return twodescent::cli::run(args, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "descent2: " << e.what() << "\n";
    return 1;
  }
}
