#include <iostream>
#include <string>
#include <vector>

#include "tmw/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tmw::cli::run_cli(args, std::cout, std::cerr, {tmw::cli::color_wanted()});
}
