#include "kcq/cli.hpp"

int main(int argc, char** argv) { return kcq::cli::main(argc, argv); }
