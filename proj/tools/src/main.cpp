#include <iostream>

#include "capbp/cli.hpp"

int main(int argc, char** argv) { return capbp::cli::main(argc, argv, std::cout, std::cerr); }
