#include <iostream>
#include <vector>

#include "tsvar/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return tsvar::cli::run(std::move(args), std::cout, std::cerr);
}
