#include <iostream>

#include "gsbm/cli.hpp"

int main(int argc, char** argv) { return gsbm::cli::run(argc, argv, std::cout, std::cerr); }
