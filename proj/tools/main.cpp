#include "cli.hpp"

int main(int argc, char** argv) { return committee::cli::main(argc, argv); }
