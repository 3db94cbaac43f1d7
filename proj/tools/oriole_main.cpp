#include <iostream>

#include "oriole/cli.hpp"

int main(int argc, char** argv) {
    return oriole::cli::run_main(argc, argv, std::cout, std::cerr);
}
