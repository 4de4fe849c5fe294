#include <iostream>

#include "whiskersim/cli.hpp"

int main(int argc, char** argv) {
  return whiskersim::run_cli({argv, argv + argc}, std::cout, std::cerr);
}
