#include <iostream>

#include "xrank/cli.hpp"

int main(int argc, char** argv) { return xrank::cli::run(argc, argv, std::cout, std::cerr); }
