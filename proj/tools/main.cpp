#include "spacelike/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return spacelike::cli::run_cli(argc, argv, std::cout, std::cerr); }
