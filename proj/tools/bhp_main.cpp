#include <iostream>

#include "bhp/cli.hpp"

int main(int argc, char** argv) { return bhp::cli::run(argc, argv, std::cout, std::cerr); }
