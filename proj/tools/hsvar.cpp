#include "hsvar/cli.hpp"

int main(int argc, char** argv) { return hsvar::cli::run_cli(argc, argv); }
