#include "rtvae/cli/app.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return rtvae::cli::run(argc, argv, std::cout, std::cerr);
}
