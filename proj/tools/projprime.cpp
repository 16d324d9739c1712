#include <iostream>

#include "projprime/cli.hpp"

int main(int argc, char** argv) { return projprime::cli::run(argc, argv, std::cin, std::cout, std::cerr); }
