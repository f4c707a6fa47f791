#include <iostream>

#include "cosadmit/cli.hpp"

int main(int argc, char** argv) { return cosadmit::run_cli(argc, argv, std::cout, std::cerr); }
