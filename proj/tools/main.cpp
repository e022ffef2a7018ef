#include <iostream>

#include "pnet/cli/cli.hpp"

int main(int argc, char** argv) { return pnet::cli::main(argc, argv, std::cout, std::cerr); }
