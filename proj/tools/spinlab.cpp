#include "spinlab_cli.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
    unsigned threads = 0;
    if (const char* env = std::getenv("SPINLAB_THREADS")) {
        try {
            threads = static_cast<unsigned>(std::stoul(env));
        } catch (const std::exception&) {
            std::cerr << "spinlab: SPINLAB_THREADS must be a non-negative integer\n";
            return spinlab::cli::kUsage;
        }
    }
    return spinlab::cli::run(argc, argv, std::cout, std::cerr, threads);
}
