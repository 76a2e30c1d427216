#include <iostream>
#include <string>
#include <vector>

#include "splinetok/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return splinetok::cli::run(args, std::cout, std::cerr);
}
