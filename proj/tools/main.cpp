#include "pseudoherm/cli.hpp"

int main(int argc, char** argv) { return pseudoherm::cli::run_cli(argc, argv); }
