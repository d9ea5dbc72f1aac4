#include <iostream>

#include "locsym/job.hpp"

int main(int argc, char** argv) {
    return locsym::run_command_line(argc, argv, std::cout, std::cerr);
}
