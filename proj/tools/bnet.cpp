#include <iostream>

#include "bnet/cli.hpp"

int main(int argc, char** argv) { return bnet::cli::run(argc, argv, std::cout, std::cerr); }
