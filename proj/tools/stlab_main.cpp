#include <iostream>

#include "stlab/cli.hpp"

int main(int argc, char** argv) { return stlab::run(argc, argv, std::cout, std::cerr); }
