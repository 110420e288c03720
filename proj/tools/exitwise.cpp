#include "exitwise/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return exitwise::run_cli(argc, argv, std::cout, std::cerr);
}
