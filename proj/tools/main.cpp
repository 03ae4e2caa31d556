#include "cli_io.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return gfcli::main_entry(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
