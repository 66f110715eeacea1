#include <iostream>

#include "numgeo/cli.hpp"

int main(int argc, char** argv) { return numgeo::cli::run_cli(argc, argv, std::cout, std::cerr); }
