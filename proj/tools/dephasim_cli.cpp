#include <iostream>

#include "dephasim/cli/commands.hpp"

int main(int argc, char** argv) { return dephasim::cli::run(argc, argv, std::cout, std::cerr); }
