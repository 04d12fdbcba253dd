#include <iostream>

#include "gapm/cli/commands.hpp"

int main(int argc, char** argv) { return gapm::cli::main_entry(argc, argv, std::cout, std::cerr); }
