#include "palmgrid/cli/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return palmgrid::cli::run(argc, argv, std::cout, std::cerr); }
