#include <iostream>

#include "haptic/cli.hpp"

int main(int argc, char** argv) { return haptic::cli::run(argc, argv, std::cout, std::cerr); }
