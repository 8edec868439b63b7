#include <iostream>

#include "cubic/cli.hpp"

int main(int argc, char** argv) { return cubic::cli::run(argc, argv, std::cout, std::cerr); }
