#include <iostream>

#include "permix/cli.hpp"

int main(int argc, char** argv) { return permix::cli::run(argc, argv, std::cout, std::cerr); }
