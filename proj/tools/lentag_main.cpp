#include "lentag/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return lentag::cli::run(argc, argv, std::cout, std::cerr); }
