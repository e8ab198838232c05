#include <iostream>

#include "ldacs/cli.hpp"

int main(int argc, char** argv) { return ldacs::cli::parse_and_run(argc, argv, std::cout, std::cerr); }
