#include <iostream>

#include "deur/cli.hpp"

int main(int argc, char** argv) { return deur::cli::main(argc, argv, std::cout, std::cerr); }
