#include "blab/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return blab::run_cli(argc, argv, std::cout, std::cerr); }
