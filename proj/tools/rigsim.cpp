#include "rigsim/cli.hpp"

int main(int argc, char** argv) { return rigsim::cli::run(argc, argv); }
