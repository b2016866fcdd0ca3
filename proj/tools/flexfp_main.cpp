#include <iostream>

#include "flexfp/cli.hpp"

int main(int argc, char** argv) { return flexfp::cli::main_entry(argc, argv, std::cout, std::cerr); }
