#include <iostream>

#include "claytobit/cli.hpp"

int main(int argc, char** argv) {
  return claytobit::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
