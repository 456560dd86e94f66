#include <iostream>

#include "mint/cli/cli.hpp"

int main(int argc, char** argv) { return mint::cli::run_cli(argc, argv, std::cout, std::cerr); }
