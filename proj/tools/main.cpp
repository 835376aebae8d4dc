#include "reachnav/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return reachnav::run_cli(argc, argv, std::cout, std::cerr); }
