#include <iostream>

#include "hyperdiff/cli.hpp"

int main(int argc, char** argv) { return hyperdiff::main_entry(argc, argv, std::cout, std::cerr); }
