#include <iostream>

#include "matrod/cli.hpp"

int main(int argc, char** argv) { return matrod::cli::run(argc, argv, std::cout, std::cerr); }
