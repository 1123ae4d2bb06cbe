#include <iostream>

#include "curev/cli.hpp"

int main(int argc, char** argv) { return curev::cli::run(argc, argv, std::cout, std::cerr); }
