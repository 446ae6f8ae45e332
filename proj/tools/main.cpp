#include <iostream>

#include "copulascore/cli/commands.hpp"

int main(int argc, char** argv) {
    return copulascore::cli::run(argc, argv, std::cout, std::cerr);
}
