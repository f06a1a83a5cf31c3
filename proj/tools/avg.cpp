// ---------------------------------------------------------------------------
// avg — command-line front end.  All logic lives in avg::cli::run so the
// test suite can drive the binary in-process with captured streams.
// ---------------------------------------------------------------------------

#include <iostream>
#include <string>
#include <vector>

#include "avg/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return avg::cli::run(args, std::cout, std::cerr);
}
