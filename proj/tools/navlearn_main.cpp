#include <iostream>

#include "navlearn/cli.hpp"

int main(int argc, char **argv) { return navlearn::run_cli(argc, argv, std::cout, std::cerr); }
