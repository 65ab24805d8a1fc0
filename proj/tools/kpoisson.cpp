#include "kpoisson/cli.hpp"

int main(int argc, char** argv) { return kpoisson::cli_main(argc, argv); }
