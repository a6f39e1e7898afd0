#include <iostream>

#include "rsdesign/cli.hpp"

int main(int argc, char** argv) { return rsdesign::run_cli(argc, argv, std::cout, std::cerr); }
