#include "cli.hpp"

int main(int argc, char** argv) { return syncnet::cli::cli_main(argc, argv); }
