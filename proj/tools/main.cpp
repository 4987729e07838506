#include <iostream>

#include "multimapper/cli.hpp"

int main(int argc, char** argv) { return mm::cli::run(argc, argv, std::cout, std::cerr); }
