#include <iostream>

#include "crater/cli.hpp"

int main(int argc, char** argv) { return crater::run_cli(argc, argv, std::cout, std::cerr); }
