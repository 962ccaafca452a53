#include <iostream>

#include "vmb/cli.hpp"

int main(int argc, char** argv) { return vmb::run_cli(argc, argv, std::cout, std::cerr); }
