#include <iostream>

#include "rrmc/cli.hpp"

int main(int argc, char** argv) { return rrmc::cli::run_main(argc, argv, std::cout, std::cerr); }
