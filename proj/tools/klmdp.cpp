#include <iostream>

#include "klmdp/cli/commands.hpp"

int main(int argc, char** argv) { return klmdp::cli::run_cli(argc, argv, std::cout, std::cerr); }
