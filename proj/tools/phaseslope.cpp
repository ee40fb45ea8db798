#include "phaseslope/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return phaseslope::cli::run(argc, argv, std::cout, std::cerr); }
