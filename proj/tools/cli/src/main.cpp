#include <iostream>

#include "qee/cli/commands.hpp"

int main(int argc, char** argv) { return qee::cli::run(argc, argv, std::cout, std::cerr); }
