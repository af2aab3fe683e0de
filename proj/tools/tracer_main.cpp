#include <iostream>

#include "tracer/cli.hpp"

int main(int argc, char** argv) { return tracer::cli::run(argc, argv, std::cout, std::cerr); }
