#include <iostream>

#include "pcsr/cli.hpp"

int main(int argc, char** argv) { return pcsr::run_cli(argc, argv, std::cout, std::cerr); }
