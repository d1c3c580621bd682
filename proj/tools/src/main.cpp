#include "corrcast_cli/cli.hpp"

int main(int argc, char** argv) { return corrcast::cli::run_cli(argc, argv); }
