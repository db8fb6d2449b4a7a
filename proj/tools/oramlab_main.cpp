#include <iostream>

#include "oramlab/cli.hpp"

int main(int argc, char** argv) { return oramlab::cli::run(argc, argv, std::cout, std::cerr); }
