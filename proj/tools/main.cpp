#include <iostream>
#include <string>
#include <vector>

#include "cli.hpp"

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);
    const std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return fracwalk::cli::run(args, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << '\n';
        return fracwalk::cli::kExitViolation;
    }
}
