#include <iostream>
#include <string>
#include <vector>

#include "bowae/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return bowae::run_cli(args, std::cout, std::cerr);
}
