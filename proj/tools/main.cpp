#include "cli.hpp"

int main(int argc, char** argv) { return fpld::cli::run_cli(argc, argv); }
