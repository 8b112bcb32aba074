#include <iostream>
#include <string>
#include <vector>

#include "semhier/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return semhier::cli::run(args, std::cout, std::cerr);
}
