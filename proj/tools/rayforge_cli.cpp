#include <iostream>

#include "rayforge/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return rayforge::run_cli(args, std::cout, std::cerr);
}
