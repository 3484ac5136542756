#include <iostream>

#include "rankstrat/cli.hpp"

int main(int argc, char** argv) { return rankstrat::cli::run(argc, argv, std::cout, std::cerr); }
