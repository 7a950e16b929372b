#include "edgeguard/cli.hpp"

int main(int argc, char** argv) { return edgeguard::cli::run_command(argc, argv); }
