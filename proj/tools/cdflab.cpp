#include <iostream>
#include <string>
#include <vector>

#include "cdflab/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return cdflab::cli_main(args, std::cout, std::cerr);
}
