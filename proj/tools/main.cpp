#include <iostream>
#include <string>
#include <vector>

#include <finsler/cli.hpp>

int main(int argc, char** argv) {
    return finsler::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout,
                             std::cerr);
}
