#include <iostream>

#include "fixedsnr/cli.hpp"

int main(int argc, char** argv) { return fixedsnr::run_cli(argc, argv, std::cout, std::cerr); }
