#include <iostream>

#include "dhc/cli.hpp"

int main(int argc, char** argv) { return dhc::cli::main_entry(argc, argv, std::cout, std::cerr); }
