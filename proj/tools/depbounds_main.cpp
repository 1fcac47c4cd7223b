#include "depbounds/cli.hpp"

int main(int argc, char** argv) { return depbounds::cli::main_entry(argc, argv); }
