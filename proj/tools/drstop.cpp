#include "drstop/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return drstop::cli::run(argc, argv, std::cout, std::cerr);
}
