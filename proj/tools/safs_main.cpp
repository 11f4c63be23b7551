#include <iostream>

#include "safs/cli.hpp"

int main(int argc, char** argv) { return safs::cli::run(argc, argv, std::cout, std::cerr); }
