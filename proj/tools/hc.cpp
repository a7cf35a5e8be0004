#include <iostream>

#include "hc/cli/app.hpp"

int main(int argc, char** argv) { return hc::cli::run_cli(argc, argv, std::cout, std::cerr); }
