#include <iostream>

#include "powecon/cli.hpp"

int main(int argc, char** argv)
{
    return powecon::cli::run_cli(argc, argv, std::cout, std::cerr);
}
