#include <iostream>

#include "qrc/cli.hpp"

int main(int argc, char** argv) { return qrc::run_cli(argc, argv, std::cout, std::cerr); }
