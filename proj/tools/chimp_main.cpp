#include "chimp/cli.hpp"

int main(int argc, char** argv) { return chimp::cli::main_entry(argc, argv); }
