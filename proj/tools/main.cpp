#include <iostream>
#include <vector>

#include "nibskg/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return nibskg::run_cli(args, std::cout, std::cerr);
}
