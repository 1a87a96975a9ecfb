#include "fspec/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return fspec::run_cli(argc, argv, std::cout, std::cerr);
}
