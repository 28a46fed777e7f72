#include <iostream>

#include "evanshock/cli.hpp"

int main(int argc, char** argv) {
  return evanshock::cli::dispatch({argv + 1, argv + argc}, std::cout, std::cerr);
}
