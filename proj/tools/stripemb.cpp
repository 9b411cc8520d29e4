#include "stripemb/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return stripemb::cli::run_cli(argc, argv, std::cout, std::cerr);
}
