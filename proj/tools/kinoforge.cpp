#include <iostream>

#include "kinoforge/cli.hpp"

int main(int argc, char** argv) { return kinoforge::cli::run(argc, argv, std::cout, std::cerr); }
