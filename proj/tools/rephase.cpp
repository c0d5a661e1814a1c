#include <iostream>

#include "rephase/cli.hpp"

int main(int argc, char** argv) { return rephase::cli::run(argc, argv, std::cout, std::cerr); }
