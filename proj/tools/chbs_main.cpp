#include <iostream>

#include "chbs/cli.hpp"

int main(int argc, char** argv) { return chbs::run_cli(argc, argv, std::cout, std::cerr); }
