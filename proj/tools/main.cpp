#include <iostream>

#include "hilsim/cli.hpp"

int main(int argc, char** argv) {
  return hilsim::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
