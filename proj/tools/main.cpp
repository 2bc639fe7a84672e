#include <iostream>

#include "sessionsplit/cli.hpp"

int main(int argc, char** argv) {
    return sessionsplit::run(argc, argv, std::cout, std::cerr);
}
