#include "lqss/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return lqss::cli::run(argc, argv, std::cout, std::cerr); }
