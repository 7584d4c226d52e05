#include "latlab/cli.hpp"

int main(int argc, char** argv) { return latlab::cli::cli_main(argc, argv); }
