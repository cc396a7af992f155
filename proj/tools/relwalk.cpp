#include <iostream>

#include "relwalk/cli.hpp"

int main(int argc, char** argv)
{
    return relwalk::main_entry(argc, argv, std::cout, std::cerr);
}
