#include <iostream>

#include "ghim/cli.hpp"

int main(int argc, char** argv) { return ghim::run_cli(argc, argv, std::cout, std::cerr); }
