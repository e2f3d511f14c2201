#include <iostream>

#include "levydc/cli.hpp"

int main(int argc, char** argv) { return levydc::cli::run_cli(argc, argv, std::cout, std::cerr); }
