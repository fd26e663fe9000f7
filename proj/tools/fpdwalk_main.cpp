#include "fpdwalk/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return fpdwalk::run_cli(argc, argv, std::cout, std::cerr); }
