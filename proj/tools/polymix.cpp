// polymix command-line runner; subcommands are wired up in cli_main.
#include "cli_impl.hpp"

int main(int argc, char** argv) { return polymix_cli::cli_main(argc, argv); }
