#include <iostream>

#include "memthermo/cli.hpp"

int main(int argc, char** argv) { return memthermo::cli_dispatch(argc, argv, std::cout, std::cerr); }
