#include "hardy/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return hardy::cli::run(argc, argv, std::cout, std::cerr); }
